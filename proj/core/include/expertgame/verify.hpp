#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "expertgame/types.hpp"

namespace expertgame {

/// Outcome of one numerical check. pass == (max_residual <= tolerance).
struct ResidualReport {
  std::string id;
  std::int64_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::json metadata = nlohmann::json::object();

  static ResidualReport make(std::string id, std::int64_t samples,
                             double max_residual, double tolerance,
                             nlohmann::json metadata = nlohmann::json::object());
};

void to_json(nlohmann::json& j, const ResidualReport& r);

/// u(x) - (1/2) max_J e_J^T D^2u(x) e_J - Phi(x).
double residual_hjb(const RegretState& x);

/// Step for the finite-difference checks of v3.
inline constexpr double kVStep = 1e-4;

/// v - (1/2) D^2_{(1,-1,1)} v by central differences at steps h and h/2
/// combined by one Richardson extrapolation. Needs y_k >= 2h.
double residual_v_pde(const GapVector& y, double h = kVStep);

/// Oblique-derivative residual on face `face` (0-based, y[face] == 0):
///   face 2: d3 v - d2 v / 2 + 1/2
///   face 1: d2 v - (d1 v + d3 v) / 2
///   face 0: d1 v - d2 v / 2
/// Derivatives are second-order one-sided near the boundary, central inside.
double residual_reflection(const GapVector& y, int face, double h = kVStep);

enum class HyperbolicPair { FR1, HR2 };

/// Residuals of
///   (dx - 2 dy) F - 2 coth(x) F + 2 csch(x) R
///   dx R + 2 csch(x) F - 2 coth(x) R
/// for (F, R) = (f, r1) or (h, r2), central differences with step h.
std::array<double, 2> residual_hyperbolic(double x, double y,
                                          HyperbolicPair pair, double h = 1e-5);

/// g_J = u - Phi - (1/2) e_J^T D^2u e_J for every mask J.
std::array<double, 16> comb_gaps(const RegretState& x);

/// Largest |d_i U - d_j U| over coordinates tied with another coordinate.
ResidualReport check_regularity(const RegretState& x);

/// Largest Hessian entry difference between x + eps*e and x - eps*e, where e
/// separates each tied pair in both orders.
ResidualReport check_hessian_continuity(const RegretState& x,
                                        double eps = 1e-7);

/// Low-discrepancy points in [lo, hi]^dim.
std::vector<std::array<double, 4>> sobol_points(int dim, std::size_t count,
                                                double lo, double hi);

/// Points on, and within 1e-3 of, every tie locus of four coordinates in
/// [lo, hi]^4 (pairs, triples, two pairs, all four).
std::vector<std::array<double, 4>> locus_points(std::size_t per_locus,
                                                double lo, double hi,
                                                std::uint64_t seed);

struct ConvergenceRow {
  double delta = 0.0;
  int radius = 0;
  double value = 0.0;  // sqrt(delta) V(0)
  double target = 0.0;
  double error = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

struct ConvergenceTable {
  int n = 0;
  std::vector<ConvergenceRow> rows;
  ResidualReport report;  // pass iff |error| strictly decreases
};

/// sqrt(delta) V^delta(0) against the limit value for each delta in order.
/// radius_scale r gives radius ceil(r / sqrt(delta)) (at least 4).
ConvergenceTable convergence_table(int n, const std::vector<double>& deltas,
                                   double radius_scale, double tol,
                                   int threads = 1);

struct SuiteOptions {
  bool quick = false;
  int threads = 1;
  std::uint64_t seed = 20240611;
};

/// Suites: hjb, vpde, reflections, hyperbolic, combgaps, regularity,
/// convergence, all. Throws std::invalid_argument for other names.
std::vector<ResidualReport> run_suite(const std::string& suite,
                                      const SuiteOptions& opts = {});

const std::vector<std::string>& suite_names();

void print_summary(std::ostream& os, const std::vector<ResidualReport>& reports);

}  // namespace expertgame
