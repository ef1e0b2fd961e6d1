#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "expertgame/simplex.hpp"
#include "expertgame/types.hpp"

namespace expertgame {

/// Continuation value c_J for every J in P(N), indexed by bitmask.
class SubsetCosts {
 public:
  explicit SubsetCosts(int n);
  SubsetCosts(int n, std::span<const double> by_mask);

  int n() const noexcept { return n_; }
  int count() const noexcept { return 1 << n_; }
  double operator[](std::uint32_t mask) const { return c_[mask]; }
  double operator[](ExpertSubset j) const { return c_[j.mask()]; }
  void set(std::uint32_t mask, double value);

 private:
  std::array<double, 16> c_{};
  int n_;
};

/// A point of the simplex U: alpha_i >= 0, sum = 1.
struct MixedPlayer {
  int n = 0;
  Vec4 alpha{};
};

/// A point of the simplex V over P(N), indexed by bitmask.
struct MixedNature {
  int n = 0;
  std::array<double, 16> beta{};
};

struct InnerSolution {
  double value = 0.0;
  MixedPlayer alpha;
};

struct InnerDualSolution {
  double value = 0.0;
  MixedNature beta;
};

/// min over alpha in U of max over J of (c_J - sum_{i in J} alpha_i).
InnerSolution dpp_inner(const SubsetCosts& c);

/// max over beta in V of sum_J beta_J c_J - max_i P_beta(i in J).
InnerDualSolution dpp_inner_dual(const SubsetCosts& c);

/// Reusable primal solver; one instance per thread.
class InnerSolver {
 public:
  explicit InnerSolver(int n);
  InnerSolution solve(const SubsetCosts& c);
  /// Value only, skipping the construction of alpha.
  double value(const SubsetCosts& c);

 private:
  int n_;
  LinearProgram lp_;
  SimplexWorkspace ws_;
  LpSolution last_;
  double run(const SubsetCosts& c);
};

/// Which recursion a ValueGrid holds.
enum class GameKind { Minimax, BalancedComb };

/// Values V on the translation-reduced lattice. A point g in {0..radius}^{N-1}
/// stands for the state (0, g1, g1+g2, ...). Storage is row-major with the
/// first gap varying slowest.
struct ValueGrid {
  int n = 0;
  double delta = 1.0;
  int radius = 0;
  double tol = 0.0;
  GameKind kind = GameKind::Minimax;
  std::string boundary_rule = "continuum_far_field";
  std::vector<double> values;

  // Solver statistics.
  int iterations = 0;
  double last_change = 0.0;
  std::vector<double> change_history;

  int dims() const noexcept { return n - 1; }
  int extent() const noexcept { return radius + 1; }
  std::size_t index(std::span<const int> g) const;
  std::vector<int> point(std::size_t index) const;
  double at(std::span<const int> g) const { return values[index(g)]; }

  /// V at an arbitrary integer state, using V(x + k 1) = V(x) + k.
  /// Throws std::out_of_range if a gap exceeds the radius.
  double lattice_value(std::span<const long long> xi) const;
};

/// Phi(s) + continuum_gap_value(sqrt(delta) g)/sqrt(delta) for the state with
/// gaps g and minimum 0; the closure used outside the radius.
double far_field_value(int n, double delta, std::span<const double> g);

struct SolveOptions {
  double tol = 1e-8;
  int threads = 1;
  /// 0 selects 10 * ceil(log(tol) / log(1 - delta)).
  int max_iterations = 0;
};

/// Jacobi value iteration for V = delta Phi + (1-delta) dpp_inner({V(x+e_J)}).
/// Throws NumericalError if the cap is reached.
ValueGrid solve_vdelta(int n, StoppingParam delta, int radius,
                       const SolveOptions& opts = {});

/// Linear recursion for nature playing the balanced comb (N = 4):
/// V = delta Phi + (1-delta)/2 (V(x+e_J) + V(x-e_J)), J = comb set of x.
ValueGrid solve_underline_u(StoppingParam delta, int radius,
                            const SolveOptions& opts = {});

/// One application of the grid's recursion; returns the new values.
std::vector<double> bellman_update(const ValueGrid& grid, int threads = 1);

/// sqrt(delta) V(round(x / sqrt(delta))) with nearest-integer rounding.
double rescaled_value(const ValueGrid& grid, const RegretState& x);

/// ceil(8 / sqrt(delta)).
int default_radius(double delta);

void to_json(nlohmann::json& j, const ValueGrid& g);
void from_json(const nlohmann::json& j, ValueGrid& g);

inline constexpr int kValueGridFormatVersion = 1;

}  // namespace expertgame
