#pragma once

#include <span>
#include <vector>

#include "expertgame/types.hpp"

/// Closed-form limit objects of the geometrically stopped expert-advice game.
///
/// The four-expert value u is evaluated on the ranked coordinates
/// x(1) <= x(2) <= x(3) <= x(4) as
///
///   u = x(4) - (sqrt2/4) sinh(sqrt2 (x(4) - x(3)))
///         + (sqrt2/2) arctan(e^s)  cosh(a) cosh(b) cosh(c)
///         + (sqrt2/2) arctanh(e^s) sinh(a) sinh(b) sinh(c)
///
/// with s = (x1+x2-x3-x4)/sqrt2, a = (x1-x2+x3-x4)/sqrt2,
/// b = (-x1+x2+x3-x4)/sqrt2, c = (-x1-x2+x3+x4)/sqrt2 = -s.
/// On the ordered chamber s <= 0 and |a|, |b| <= c, so the arctanh product
/// is finite everywhere except its removable singularity at s = 0.
///
/// All functions are pure and thread-safe.
namespace expertgame {

/// Below this |s| the arctanh product term of u4 is replaced by its limit 0.
inline constexpr double kArctanhCutoff = 1e-12;

RankedState rank(const RegretState& x);

/// max_i x_i.
double phi(const RegretState& x);

/// Gaps between consecutive ranked coordinates, N-1 entries.
GapVector gaps(const RegretState& x);

/// Four-expert limit value u.
double u4(const RegretState& x);

/// Three-expert limit value
/// x(3) + e^{sqrt2 (x(2)-x(3))}/(2 sqrt2) + e^{sqrt2 (2x(1)-x(2)-x(3))}/(6 sqrt2).
double u3(const RegretState& x);

/// Two-expert limit value x(2) + e^{-sqrt2 (x(2)-x(1))}/(2 sqrt2).
double u2(const RegretState& x);

/// Dispatches to u2/u3/u4 on x.size().
double continuum_value(const RegretState& x);

/// u - Phi written as a function of the gaps (N = gaps.size() + 1).
/// For N = 4 this is v3.
double continuum_gap_value(std::span<const double> gaps);

/// Discounted local-time value v(y1, y2, y3) of the reflected Brownian
/// motion; u4(x) = phi(x) + v3(gaps(x)).
double v3(const GapVector& y);

/// Value on the invariant diagonal y1 = y3: v3(a, b, a) = V2d(a, b).
double V2d(double y1, double y2);
double V1_fn(double x);  ///< V2d(x, 0)
double V2_fn(double x);  ///< V2d(0, x)

/// Boundary traces of v solving the hyperbolic system (see verify.hpp).
double f_fn(double x, double y);
double r1_fn(double x, double y);
double h_fn(double x, double y);
double r2_fn(double x, double y);

/// Initial traces at y = 0 as stated for the hyperbolic system.
double f_initial(double x);
double r1_initial(double x);
double h_initial(double x);
double r2_initial(double x);

/// Analytic gradient of u4. Entries lie in [0, 1] and sum to 1.
Vec4 u4_grad(const RegretState& x);

/// Analytic Hessian of u4 (its C2 extension on coordinate ties).
Mat4 u4_hess(const RegretState& x);

/// Gradient of the N = 2, 3 or 4 limit value; used as a mixed strategy.
Vec4 continuum_grad(const RegretState& x);

/// Constant + linear + quadratic model of u4 at the origin.
double taylor_u4_origin(const RegretState& x);

/// e_J^T H e_J.
double quadratic_form(const Mat4& h, ExpertSubset j);

/// The leader i4 and the second-worst expert i2 (0-based indices).
struct CombChoice {
  int leader;
  int second;
};

CombChoice comb_choice(const RegretState& x);

/// {i4, i2}: nature's comb subset for four experts.
ExpertSubset comb_set(const RegretState& x);

/// Every subset whose Hessian quadratic form is within tol of the maximum,
/// in ascending mask order.
std::vector<ExpertSubset> hamiltonian_argmax(const RegretState& x, double tol);

}  // namespace expertgame
