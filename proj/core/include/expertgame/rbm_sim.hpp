#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "expertgame/types.hpp"

namespace expertgame {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

/// Orthant dimension d in {2, 3}, reflection matrix R (columns are push
/// directions), and a rank-one driving noise: the free increment is
/// drive * dW, so the covariance is drive drive^T.
struct ReflectionSpec {
  int d = 3;
  Mat3 R{};
  Vec3 drive{};
  /// Face whose discounted local time is the functional of interest.
  int target = 2;

  /// R = [[1,-1/2,0],[-1/2,1,-1/2],[0,-1/2,1]], drive (+1,-1,+1), target y3.
  static ReflectionSpec default3();
  /// R = [[1,-1/2],[-1,1]], drive (+1,-1), target y1.
  static ReflectionSpec default2();

  Mat3 gamma() const;
  /// Throws std::invalid_argument unless diag(R) = 1 and rho(|R - I|) < 1.
  void validate() const;
};

struct PushResult {
  Vec3 y{};
  Vec3 dlambda{};
  int iterations = 0;
};

/// Discrete Skorokhod problem: the minimal dlambda >= 0 with
/// y = y_free + R dlambda >= 0 and dlambda_i y_i = 0. Jacobi fixed point;
/// throws NumericalError after 10^4 sweeps.
PushResult skorokhod_push(const Vec3& y_free, const ReflectionSpec& spec);

struct RbmPath {
  Vec3 y{};
  Vec3 lambda{};
  double t = 0.0;
  /// sum of e^{-t} dLambda^target over steps (t at the end of each step).
  double disc = 0.0;
  /// sum of int e^{-s} ds * Lambda^target over steps, the other form.
  double disc_integral = 0.0;
};

RbmPath start_path(std::span<const double> y0, const ReflectionSpec& spec);

/// Free move y + drive dW, push, local-time and discount accumulation.
RbmPath step(const RbmPath& path, double dt, double dW,
             const ReflectionSpec& spec);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_paths = 0;
  double dt = 0.0;
  double horizon = 0.0;
};

void to_json(nlohmann::json& j, const McEstimate& e);

struct McOptions {
  double dt = 1e-3;
  double horizon = 12.0;
  std::int64_t n_paths = 20000;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// (1/2) E int_0^horizon e^{-s} dLambda^target_s for a general spec.
McEstimate estimate_local_time_functional(std::span<const double> y0,
                                          const ReflectionSpec& spec,
                                          const McOptions& opts);

/// Monte Carlo estimate of v3(y0) with the default three-dimensional spec.
McEstimate estimate_v_mc(const GapVector& y0, const McOptions& opts);

/// Monte Carlo estimate of V2d(y1, y2) with the default planar spec.
McEstimate estimate_V_mc(double y1, double y2, const McOptions& opts);

/// Both discounted forms on the same paths:
/// (1/2) int e^{-s} dLambda_s and (1/2) int e^{-t} Lambda_t dt.
struct FormComparison {
  McEstimate increment_form;
  McEstimate integral_form;
  /// Standard error of the pathwise difference.
  double diff_std_error = 0.0;
};

FormComparison compare_functional_forms(const GapVector& y0,
                                        const McOptions& opts);

/// CSV trace of one path (t, y..., lambda..., disc), every `stride` steps.
void write_path_csv(std::ostream& os, std::span<const double> y0,
                    const ReflectionSpec& spec, const McOptions& opts,
                    int stride = 1);

/// (1/4) sum_k k y_k + v3(y).
double v_tilde(const GapVector& y);

}  // namespace expertgame
