#pragma once

#include <vector>

namespace expertgame {

enum class RowSense { LessEqual, Equal, GreaterEqual };

/// maximize c^T x  subject to  A x (sense) b,  x >= 0.
/// A is dense row-major with `rows` x `cols` entries.
struct LinearProgram {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<RowSense> sense;

  LinearProgram() = default;
  LinearProgram(int m, int n);
  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  int pivots = 0;
};

/// Scratch buffers reused across solves. Not thread-safe; use one per thread.
class SimplexWorkspace {
 public:
  LpSolution solve(const LinearProgram& lp);

 private:
  std::vector<double> tab_;
  std::vector<int> basis_;
  std::vector<double> obj_;
};

/// Two-phase dense tableau simplex. Entering column is the most positive
/// reduced cost with the lowest index on ties; after a run of degenerate
/// pivots it switches to Bland's rule, so it always terminates.
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace expertgame
