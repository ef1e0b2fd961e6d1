#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

/// max_J (c_J - alpha(J)) for alpha on the simplex.
inline double inner_objective(const std::vector<double>& c, int n,
                              const double* alpha) {
  double best = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < (1 << n); ++m) {
    double s = c[m];
    for (int i = 0; i < n; ++i)
      if ((m >> i) & 1) s -= alpha[i];
    best = std::max(best, s);
  }
  return best;
}

/// Minimum of inner_objective over the grid {k * step} of the simplex,
/// N = 2 or 3.
inline double grid_min(const std::vector<double>& c, int n, double step) {
  const int k = static_cast<int>(std::lround(1.0 / step));
  double best = std::numeric_limits<double>::infinity();
  double a[3];
  if (n == 2) {
    for (int i = 0; i <= k; ++i) {
      a[0] = static_cast<double>(i) / k;
      a[1] = 1.0 - a[0];
      best = std::min(best, inner_objective(c, n, a));
    }
    return best;
  }
  for (int i = 0; i <= k; ++i)
    for (int j = 0; i + j <= k; ++j) {
      a[0] = static_cast<double>(i) / k;
      a[1] = static_cast<double>(j) / k;
      a[2] = 1.0 - a[0] - a[1];
      best = std::min(best, inner_objective(c, n, a));
    }
  return best;
}

/// 2^n costs drawn uniformly from [-2, 2].
inline std::vector<double> random_costs(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> c(1u << n);
  for (double& v : c) v = d(rng);
  return c;
}

}  // namespace oracle
