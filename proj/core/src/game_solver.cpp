#include "expertgame/game_solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <thread>

#include <nlohmann/json.hpp>

#include "expertgame/closed_form.hpp"

namespace expertgame {

namespace {

void check_n(int n, const char* fn) {
  if (n < 2 || n > kMaxExperts)
    throw std::invalid_argument(std::string(fn) + ": N must be 2, 3 or 4");
}

// Continuation of one subset move from one lattice point:
// c_J = offset + (target >= 0 ? V[target] : 0).
struct Link {
  std::int32_t target;
  double offset;
};

struct Lattice {
  int n;
  int dims;
  int extent;
  std::size_t size;
  int moves;  // 2^n
  std::vector<Link> links;  // size * moves
  std::vector<double> phi;  // size
};

std::size_t ipow(int base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

Lattice build_lattice(const ValueGrid& grid) {
  Lattice L;
  L.n = grid.n;
  L.dims = grid.n - 1;
  L.extent = grid.extent();
  L.size = ipow(L.extent, L.dims);
  L.moves = 1 << L.n;
  L.links.resize(L.size * L.moves);
  L.phi.resize(L.size);
  for (std::size_t p = 0; p < L.size; ++p) {
    const std::vector<int> g = grid.point(p);
    std::array<long long, 4> s{};
    for (int k = 1; k < L.n; ++k) s[k] = s[k - 1] + g[k - 1];
    L.phi[p] = static_cast<double>(s[L.n - 1]);
    for (int m = 0; m < L.moves; ++m) {
      std::array<long long, 4> t = s;
      for (int k = 0; k < L.n; ++k)
        if ((m >> k) & 1) ++t[k];
      std::sort(t.begin(), t.begin() + L.n);
      std::array<int, 3> gi{};
      std::array<double, 3> gd{};
      bool inside = true;
      for (int k = 0; k < L.dims; ++k) {
        const long long d = t[k + 1] - t[k];
        gd[k] = static_cast<double>(d);
        gi[k] = static_cast<int>(d);
        if (d > grid.radius) inside = false;
      }
      Link& link = L.links[p * L.moves + m];
      const double base = static_cast<double>(t[0]);
      if (inside) {
        link.target = static_cast<std::int32_t>(
            grid.index(std::span<const int>(gi.data(), L.dims)));
        link.offset = base;
      } else {
        link.target = -1;
        link.offset = base + far_field_value(
                                 L.n, grid.delta,
                                 std::span<const double>(gd.data(), L.dims));
      }
    }
  }
  return L;
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2) {
    fn(0, std::size_t{0}, count);
    return;
  }
  const std::size_t t = std::min<std::size_t>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t lo = count * k / t, hi = count * (k + 1) / t;
    pool.emplace_back([&fn, k, lo, hi] { fn(static_cast<int>(k), lo, hi); });
  }
  for (auto& th : pool) th.join();
}

// Nature's comb subset {i4, i2} on ranked positions, and its complement.
constexpr std::uint32_t kCombMask = (1u << 3) | (1u << 1);
constexpr std::uint32_t kCombComplement = (1u << 2) | (1u << 0);

void sweep(const ValueGrid& grid, const Lattice& L,
           const std::vector<double>& cur, std::vector<double>& next,
           int threads) {
  const double d = grid.delta;
  parallel_for(L.size, threads, [&](int, std::size_t lo, std::size_t hi) {
    InnerSolver solver(L.n);
    SubsetCosts c(L.n);
    for (std::size_t p = lo; p < hi; ++p) {
      const Link* links = &L.links[p * L.moves];
      auto cost = [&](std::uint32_t m) {
        const Link& l = links[m];
        return l.offset + (l.target >= 0 ? cur[l.target] : 0.0);
      };
      double cont;
      if (grid.kind == GameKind::BalancedComb) {
        cont = 0.5 * (cost(kCombMask) + cost(kCombComplement) - 1.0);
      } else {
        for (int m = 0; m < L.moves; ++m) c.set(m, cost(m));
        cont = solver.value(c);
      }
      next[p] = d * L.phi[p] + (1.0 - d) * cont;
    }
  });
}

ValueGrid iterate(ValueGrid grid, const SolveOptions& opts) {
  if (!(opts.tol > 0.0))
    throw std::invalid_argument("solve: tol must be > 0");
  if (grid.radius < 4) throw std::invalid_argument("solve: radius must be >= 4");
  grid.tol = opts.tol;
  const Lattice L = build_lattice(grid);

  int cap = opts.max_iterations;
  if (cap <= 0) {
    cap = grid.delta >= 1.0
              ? 2
              : 10 * static_cast<int>(std::ceil(std::log(opts.tol) /
                                                std::log1p(-grid.delta)));
    cap = std::max(cap, 2);
  }

  std::vector<double> cur(L.size), next(L.size);
  for (std::size_t p = 0; p < L.size; ++p) {
    const std::vector<int> g = grid.point(p);
    std::array<double, 3> gd{};
    for (int k = 0; k < L.dims; ++k) gd[k] = g[k];
    cur[p] = far_field_value(grid.n, grid.delta,
                             std::span<const double>(gd.data(), L.dims));
  }

  grid.change_history.clear();
  for (int it = 1; it <= cap; ++it) {
    sweep(grid, L, cur, next, opts.threads);
    double change = 0.0;
    for (std::size_t p = 0; p < L.size; ++p)
      change = std::max(change, std::fabs(next[p] - cur[p]));
    cur.swap(next);
    grid.change_history.push_back(change);
    grid.iterations = it;
    grid.last_change = change;
    if (change <= opts.tol) {
      grid.values = std::move(cur);
      return grid;
    }
  }
  throw NumericalError("value iteration did not converge within " +
                           std::to_string(cap) + " iterations",
                       grid.last_change);
}

}  // namespace

SubsetCosts::SubsetCosts(int n) : n_(n) { check_n(n, "SubsetCosts"); }

SubsetCosts::SubsetCosts(int n, std::span<const double> by_mask)
    : SubsetCosts(n) {
  if (by_mask.size() != static_cast<std::size_t>(count()))
    throw std::invalid_argument("SubsetCosts: expected 2^N values");
  for (int m = 0; m < count(); ++m) set(m, by_mask[m]);
}

void SubsetCosts::set(std::uint32_t mask, double value) {
  if (mask >= static_cast<std::uint32_t>(count()))
    throw std::invalid_argument("SubsetCosts: mask out of range");
  if (!std::isfinite(value))
    throw std::invalid_argument("SubsetCosts: non-finite cost");
  c_[mask] = value;
}

// Variables (s, alpha_1..alpha_N) with t = c_max - s:
//   maximize s  s.t.  s - alpha(J) <= c_max - c_J,  sum alpha <= 1.
// The right-hand sides are nonnegative, so the slack basis is feasible.
InnerSolver::InnerSolver(int n) : n_(n), lp_((1 << n) + 1, n + 1) {
  check_n(n, "InnerSolver");
  const int m = 1 << n;
  for (int j = 0; j < m; ++j) {
    lp_.at(j, 0) = 1.0;
    for (int i = 0; i < n; ++i) lp_.at(j, i + 1) = ((j >> i) & 1) ? -1.0 : 0.0;
  }
  for (int i = 0; i < n; ++i) lp_.at(m, i + 1) = 1.0;
  lp_.b[m] = 1.0;
  lp_.c[0] = 1.0;
}

double InnerSolver::run(const SubsetCosts& c) {
  if (c.n() != n_) throw std::invalid_argument("InnerSolver: N mismatch");
  const int m = 1 << n_;
  double cmax = c[0u];
  for (int j = 1; j < m; ++j) cmax = std::max(cmax, c[static_cast<std::uint32_t>(j)]);
  for (int j = 0; j < m; ++j) lp_.b[j] = cmax - c[static_cast<std::uint32_t>(j)];
  last_ = ws_.solve(lp_);
  if (last_.status != LpStatus::Optimal)
    throw NumericalError("dpp_inner: simplex failed");
  return cmax - last_.objective;
}

double InnerSolver::value(const SubsetCosts& c) { return run(c); }

InnerSolution InnerSolver::solve(const SubsetCosts& c) {
  InnerSolution out;
  out.value = run(c);
  out.alpha.n = n_;
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    out.alpha.alpha[i] = std::max(0.0, last_.x[i + 1]);
    sum += out.alpha.alpha[i];
  }
  // Raising any alpha_i only loosens the constraints; spread the remainder.
  const double spare = std::max(0.0, 1.0 - sum) / n_;
  for (int i = 0; i < n_; ++i) out.alpha.alpha[i] += spare;
  return out;
}

InnerSolution dpp_inner(const SubsetCosts& c) {
  InnerSolver s(c.n());
  return s.solve(c);
}

// Variables (beta_J for every mask, w):
//   maximize sum beta_J c_J - w
//   s.t. sum_{J contains i} beta_J - w <= 0 for each i, sum beta_J = 1.
InnerDualSolution dpp_inner_dual(const SubsetCosts& c) {
  const int n = c.n(), m = 1 << n;
  LinearProgram lp(n + 1, m + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) lp.at(i, j) = ((j >> i) & 1) ? 1.0 : 0.0;
    lp.at(i, m) = -1.0;
  }
  for (int j = 0; j < m; ++j) {
    lp.at(n, j) = 1.0;
    lp.c[j] = c[static_cast<std::uint32_t>(j)];
  }
  lp.sense[n] = RowSense::Equal;
  lp.b[n] = 1.0;
  lp.c[m] = -1.0;
  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal)
    throw NumericalError("dpp_inner_dual: simplex failed");
  InnerDualSolution out;
  out.value = sol.objective;
  out.beta.n = n;
  for (int j = 0; j < m; ++j) out.beta.beta[j] = std::max(0.0, sol.x[j]);
  return out;
}

std::size_t ValueGrid::index(std::span<const int> g) const {
  if (static_cast<int>(g.size()) != dims())
    throw std::invalid_argument("ValueGrid::index: wrong number of gaps");
  std::size_t idx = 0;
  for (int k = 0; k < dims(); ++k) {
    if (g[k] < 0 || g[k] > radius)
      throw std::out_of_range("ValueGrid: gap outside the truncation radius");
    idx = idx * extent() + static_cast<std::size_t>(g[k]);
  }
  return idx;
}

std::vector<int> ValueGrid::point(std::size_t idx) const {
  std::vector<int> g(dims());
  for (int k = dims() - 1; k >= 0; --k) {
    g[k] = static_cast<int>(idx % extent());
    idx /= extent();
  }
  return g;
}

double ValueGrid::lattice_value(std::span<const long long> xi) const {
  if (static_cast<int>(xi.size()) != n)
    throw std::invalid_argument("lattice_value: dimension mismatch");
  std::array<long long, 4> s{};
  std::copy(xi.begin(), xi.end(), s.begin());
  std::sort(s.begin(), s.begin() + n);
  std::array<int, 3> g{};
  for (int k = 0; k < dims(); ++k) {
    const long long d = s[k + 1] - s[k];
    if (d > radius)
      throw std::out_of_range("lattice_value: gap outside the truncation radius");
    g[k] = static_cast<int>(d);
  }
  return static_cast<double>(s[0]) +
         values.at(index(std::span<const int>(g.data(), dims())));
}

double far_field_value(int n, double delta, std::span<const double> g) {
  check_n(n, "far_field_value");
  const double sd = std::sqrt(delta);
  std::array<double, 3> scaled{};
  double phi_s = 0.0;
  for (int k = 0; k < n - 1; ++k) {
    phi_s += g[k];
    scaled[k] = sd * g[k];
  }
  return phi_s +
         continuum_gap_value(std::span<const double>(scaled.data(), n - 1)) / sd;
}

ValueGrid solve_vdelta(int n, StoppingParam delta, int radius,
                       const SolveOptions& opts) {
  check_n(n, "solve_vdelta");
  ValueGrid g;
  g.n = n;
  g.delta = delta.value();
  g.radius = radius;
  g.kind = GameKind::Minimax;
  return iterate(std::move(g), opts);
}

ValueGrid solve_underline_u(StoppingParam delta, int radius,
                            const SolveOptions& opts) {
  ValueGrid g;
  g.n = 4;
  g.delta = delta.value();
  g.radius = radius;
  g.kind = GameKind::BalancedComb;
  return iterate(std::move(g), opts);
}

std::vector<double> bellman_update(const ValueGrid& grid, int threads) {
  const Lattice L = build_lattice(grid);
  if (grid.values.size() != L.size)
    throw std::invalid_argument("bellman_update: grid has no values");
  std::vector<double> next(L.size);
  sweep(grid, L, grid.values, next, threads);
  return next;
}

double rescaled_value(const ValueGrid& grid, const RegretState& x) {
  if (x.size() != grid.n)
    throw std::invalid_argument("rescaled_value: dimension mismatch");
  const double sd = std::sqrt(grid.delta);
  std::array<long long, 4> xi{};
  for (int i = 0; i < grid.n; ++i) xi[i] = std::llround(x[i] / sd);
  return sd * grid.lattice_value(std::span<const long long>(xi.data(), grid.n));
}

int default_radius(double delta) {
  return static_cast<int>(std::ceil(8.0 / std::sqrt(delta) - 1e-9));
}

namespace {
const char* kind_name(GameKind k) {
  return k == GameKind::Minimax ? "minimax" : "balanced_comb";
}
}  // namespace

void to_json(nlohmann::json& j, const ValueGrid& g) {
  j = nlohmann::json{
      {"format_version", kValueGridFormatVersion},
      {"n", g.n},
      {"delta", g.delta},
      {"radius", g.radius},
      {"tol", g.tol},
      {"game", kind_name(g.kind)},
      {"boundary_rule", g.boundary_rule},
      {"iterations", g.iterations},
      {"last_change", g.last_change},
      {"index_order", "row-major over gaps (g1, ..., g_{n-1}), g1 slowest"},
      {"values", g.values},
  };
}

void from_json(const nlohmann::json& j, ValueGrid& g) {
  const int version = j.at("format_version").get<int>();
  if (version != kValueGridFormatVersion)
    throw std::invalid_argument("ValueGrid: unsupported format_version " +
                                std::to_string(version));
  ValueGrid out;
  out.n = j.at("n").get<int>();
  check_n(out.n, "ValueGrid");
  out.delta = j.at("delta").get<double>();
  out.radius = j.at("radius").get<int>();
  out.tol = j.at("tol").get<double>();
  const std::string game = j.at("game").get<std::string>();
  if (game == "minimax") out.kind = GameKind::Minimax;
  else if (game == "balanced_comb") out.kind = GameKind::BalancedComb;
  else throw std::invalid_argument("ValueGrid: unknown game '" + game + "'");
  out.boundary_rule = j.at("boundary_rule").get<std::string>();
  out.iterations = j.value("iterations", 0);
  out.last_change = j.value("last_change", 0.0);
  out.values = j.at("values").get<std::vector<double>>();
  if (out.values.size() != ipow(out.extent(), out.dims()))
    throw std::invalid_argument("ValueGrid: values size does not match radius");
  g = std::move(out);
}

}  // namespace expertgame
