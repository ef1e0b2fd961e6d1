#include "expertgame/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace expertgame {

namespace {

constexpr double kPivotEps = 1e-12;
constexpr double kFeasEps = 1e-10;
constexpr int kDegenerateRunBeforeBland = 32;
constexpr int kMaxPivots = 10000;

}  // namespace

LinearProgram::LinearProgram(int m, int n)
    : rows(m),
      cols(n),
      a(static_cast<std::size_t>(m) * n, 0.0),
      b(m, 0.0),
      c(n, 0.0),
      sense(m, RowSense::LessEqual) {}

LpSolution SimplexWorkspace::solve(const LinearProgram& lp) {
  const int m = lp.rows, n = lp.cols;
  if (m < 0 || n <= 0 || lp.a.size() != static_cast<std::size_t>(m) * n ||
      lp.b.size() != static_cast<std::size_t>(m) ||
      lp.c.size() != static_cast<std::size_t>(n) ||
      lp.sense.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("solve_lp: inconsistent problem dimensions");

  // Column layout: [x (n) | slack/surplus | artificial | rhs].
  int n_slack = 0, n_art = 0;
  for (int i = 0; i < m; ++i) {
    RowSense s = lp.sense[i];
    if (lp.b[i] < 0.0) {
      if (s == RowSense::LessEqual) s = RowSense::GreaterEqual;
      else if (s == RowSense::GreaterEqual) s = RowSense::LessEqual;
    }
    if (s != RowSense::Equal) ++n_slack;
    if (s != RowSense::LessEqual) ++n_art;
  }
  const int art0 = n + n_slack;
  const int total = art0 + n_art;
  const int w = total + 1;
  tab_.assign(static_cast<std::size_t>(m) * w, 0.0);
  basis_.assign(m, -1);
  obj_.assign(w, 0.0);
  auto row = [&](int i) { return tab_.data() + static_cast<std::size_t>(i) * w; };

  int next_slack = n, next_art = art0;
  for (int i = 0; i < m; ++i) {
    double* r = row(i);
    const double sign = lp.b[i] < 0.0 ? -1.0 : 1.0;
    RowSense s = lp.sense[i];
    if (sign < 0.0) {
      if (s == RowSense::LessEqual) s = RowSense::GreaterEqual;
      else if (s == RowSense::GreaterEqual) s = RowSense::LessEqual;
    }
    for (int j = 0; j < n; ++j) r[j] = sign * lp.a[static_cast<std::size_t>(i) * n + j];
    r[total] = sign * lp.b[i];
    if (s == RowSense::LessEqual) {
      r[next_slack] = 1.0;
      basis_[i] = next_slack++;
    } else if (s == RowSense::GreaterEqual) {
      r[next_slack++] = -1.0;
      r[next_art] = 1.0;
      basis_[i] = next_art++;
    } else {
      r[next_art] = 1.0;
      basis_[i] = next_art++;
    }
  }

  LpSolution sol;
  auto pivot = [&](int pr, int pc) {
    double* r = row(pr);
    const double inv = 1.0 / r[pc];
    for (int j = 0; j < w; ++j) r[j] *= inv;
    r[pc] = 1.0;
    for (int i = 0; i < m; ++i) {
      if (i == pr) continue;
      double* q = row(i);
      const double f = q[pc];
      if (f == 0.0) continue;
      for (int j = 0; j < w; ++j) q[j] -= f * r[j];
      q[pc] = 0.0;
    }
    const double f = obj_[pc];
    if (f != 0.0) {
      for (int j = 0; j < w; ++j) obj_[j] -= f * r[j];
      obj_[pc] = 0.0;
    }
    basis_[pr] = pc;
    ++sol.pivots;
  };

  // Simplex on obj_ restricted to entering columns [0, limit).
  auto iterate = [&](int limit) -> LpStatus {
    int degenerate_run = 0;
    while (true) {
      if (sol.pivots >= kMaxPivots) return LpStatus::IterationLimit;
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      int pc = -1;
      double best = kPivotEps;
      for (int j = 0; j < limit; ++j) {
        if (obj_[j] > best) {
          pc = j;
          if (bland) break;
          best = obj_[j];
        }
      }
      if (pc < 0) return LpStatus::Optimal;
      int pr = -1;
      double ratio = INFINITY;
      for (int i = 0; i < m; ++i) {
        const double* r = row(i);
        if (r[pc] <= kPivotEps) continue;
        const double t = r[total] / r[pc];
        if (pr < 0 || t < ratio - kPivotEps) {
          pr = i;
          ratio = t;
        } else if (t <= ratio + kPivotEps && basis_[i] < basis_[pr]) {
          pr = i;
        }
      }
      if (pr < 0) return LpStatus::Unbounded;
      degenerate_run = ratio <= kPivotEps ? degenerate_run + 1 : 0;
      pivot(pr, pc);
    }
  };

  auto price_out = [&]() {
    for (int i = 0; i < m; ++i) {
      const double f = obj_[basis_[i]];
      if (f == 0.0) continue;
      const double* r = row(i);
      for (int j = 0; j < w; ++j) obj_[j] -= f * r[j];
    }
  };

  if (n_art > 0) {
    for (int j = art0; j < total; ++j) obj_[j] = -1.0;
    price_out();
    const LpStatus s1 = iterate(total);
    if (s1 == LpStatus::IterationLimit) {
      sol.status = s1;
      return sol;
    }
    if (obj_[total] > kFeasEps) {  // -(sum of artificials) < 0
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    for (int i = 0; i < m; ++i) {
      if (basis_[i] < art0) continue;
      const double* r = row(i);
      for (int j = 0; j < art0; ++j) {
        if (std::fabs(r[j]) > 1e-9) {
          pivot(i, j);
          break;
        }
      }
    }
    std::fill(obj_.begin(), obj_.end(), 0.0);
  }

  for (int j = 0; j < n; ++j) obj_[j] = lp.c[j];
  price_out();
  sol.status = iterate(art0);
  if (sol.status != LpStatus::Optimal) return sol;

  sol.x.assign(n, 0.0);
  for (int i = 0; i < m; ++i)
    if (basis_[i] < n) sol.x[basis_[i]] = row(i)[total];
  sol.objective = -obj_[total];
  return sol;
}

LpSolution solve_lp(const LinearProgram& lp) {
  SimplexWorkspace ws;
  return ws.solve(lp);
}

}  // namespace expertgame
