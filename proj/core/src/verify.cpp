#include "expertgame/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>

#include <boost/random/sobol.hpp>

#include "expertgame/closed_form.hpp"
#include "expertgame/game_solver.hpp"

namespace expertgame {

namespace {

const double kPi = std::numbers::pi;
const double kSqrt2 = std::numbers::sqrt2;

double v_at(const std::array<double, 3>& y) {
  return v3(GapVector{y[0], y[1], y[2]});
}

// dv/dy_k: central when the stencil fits in the orthant, otherwise the
// second-order forward difference.
double v_partial(const GapVector& y, int k, double h) {
  std::array<double, 3> base{y[0], y[1], y[2]};
  auto at = [&](double off) {
    std::array<double, 3> p = base;
    p[k] += off;
    return v_at(p);
  };
  if (y[k] >= 2.0 * h) return (at(h) - at(-h)) / (2.0 * h);
  return (-3.0 * at(0.0) + 4.0 * at(h) - at(2.0 * h)) / (2.0 * h);
}

using Fn2 = double (*)(double, double);

double partial_x(Fn2 f, double x, double y, double h) {
  if (x >= 2.0 * h) return (f(x + h, y) - f(x - h, y)) / (2.0 * h);
  return (-3.0 * f(x, y) + 4.0 * f(x + h, y) - f(x + 2.0 * h, y)) / (2.0 * h);
}

double partial_y(Fn2 f, double x, double y, double h) {
  if (y >= 2.0 * h) return (f(x, y + h) - f(x, y - h)) / (2.0 * h);
  return (-3.0 * f(x, y) + 4.0 * f(x, y + h) - f(x, y + 2.0 * h)) / (2.0 * h);
}

std::vector<std::pair<int, int>> tied_pairs(const RegretState& x) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < x.size(); ++i)
    for (int j = i + 1; j < x.size(); ++j)
      if (x[i] == x[j]) out.emplace_back(i, j);
  return out;
}

RegretState from_array(const std::array<double, 4>& a) {
  return RegretState{a[0], a[1], a[2], a[3]};
}

std::vector<std::array<double, 4>> hjb_points(const SuiteOptions& o) {
  auto pts = sobol_points(4, o.quick ? 2000 : 10000, -2.0, 2.0);
  const auto loci = locus_points(o.quick ? 40 : 200, -2.0, 2.0, o.seed);
  pts.insert(pts.end(), loci.begin(), loci.end());
  return pts;
}

// ---- suites ---------------------------------------------------------------

std::vector<ResidualReport> suite_hjb(const SuiteOptions& o) {
  std::vector<ResidualReport> out;
  const auto pts = hjb_points(o);
  double worst = 0.0;
  std::array<double, 4> arg{};
  for (const auto& p : pts) {
    const double r = std::fabs(residual_hjb(from_array(p)));
    if (r > worst) {
      worst = r;
      arg = p;
    }
  }
  out.push_back(ResidualReport::make("hjb", static_cast<std::int64_t>(pts.size()),
                                     worst, 1e-7, {{"argmax", arg}}));

  const double u0 = u4({0.0, 0.0, 0.0, 0.0});
  out.push_back(ResidualReport::make("u4_origin", 1,
                                     std::fabs(u0 - kPi / (4.0 * kSqrt2)), 1e-12,
                                     {{"value", u0}}));

  const Mat4 h0 = u4_hess({0.0, 0.0, 0.0, 0.0});
  double herr = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      herr = std::max(herr, std::fabs(h0[i][j] - kPi / (8.0 * kSqrt2) *
                                                     (i == j ? 3.0 : -1.0)));
  out.push_back(ResidualReport::make("hessian_origin", 16, herr, 1e-6));

  // Central-difference Hessian from values of u at two steps; the error
  // ratio should be close to 4.
  const RegretState x{0.1, 0.5, -0.2, 0.9};
  const Mat4 ha = u4_hess(x);
  auto fd_err = [&](double h) {
    double e = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double fd =
            (u4(x.shifted(i, h).shifted(j, h)) - u4(x.shifted(i, h).shifted(j, -h)) -
             u4(x.shifted(i, -h).shifted(j, h)) + u4(x.shifted(i, -h).shifted(j, -h))) /
            (4.0 * h * h);
        e = std::max(e, std::fabs(fd - ha[i][j]));
      }
    return e;
  };
  const double e1 = fd_err(1e-3), e2 = fd_err(5e-4);
  const double ratio = e1 / e2;
  out.push_back(ResidualReport::make(
      "hessian_fd_order", 2, std::fabs(ratio - 4.0), 1.0,
      {{"err_h1e-3", e1}, {"err_h5e-4", e2}, {"ratio", ratio}}));
  return out;
}

std::vector<ResidualReport> suite_vpde(const SuiteOptions& o) {
  const std::size_t n = o.quick ? 200 : 1000;
  const auto pts = sobol_points(3, n + 1, 0.01, 3.0);
  double worst = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const auto& p = pts[k];
    worst = std::max(worst, std::fabs(residual_v_pde(GapVector{p[0], p[1], p[2]})));
  }
  return {ResidualReport::make("v_pde", static_cast<std::int64_t>(n), worst, 1e-6,
                               {{"h", kVStep}, {"richardson", true}})};
}

std::vector<ResidualReport> suite_reflections(const SuiteOptions& o) {
  const std::size_t n = o.quick ? 200 : 1000;
  const auto pts = sobol_points(2, n + 1, 0.01, 3.0);
  std::vector<ResidualReport> out;
  const char* ids[3] = {"reflection_y1", "reflection_y2", "reflection_y3"};
  for (int face = 2; face >= 0; --face) {
    double worst = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      std::array<double, 3> y{};
      int c = 0;
      for (int i = 0; i < 3; ++i) y[i] = i == face ? 0.0 : pts[k][c++];
      worst = std::max(worst, std::fabs(residual_reflection(
                                  GapVector{y[0], y[1], y[2]}, face)));
    }
    out.push_back(ResidualReport::make(ids[face], static_cast<std::int64_t>(n),
                                       worst, 1e-6, {{"h", kVStep}}));
  }
  return out;
}

std::vector<ResidualReport> suite_hyperbolic(const SuiteOptions&) {
  std::vector<ResidualReport> out;
  const int m = 50;
  for (HyperbolicPair pair : {HyperbolicPair::FR1, HyperbolicPair::HR2}) {
    double worst = 0.0;
    for (int i = 1; i <= m; ++i)
      for (int j = 1; j <= m; ++j) {
        const double x = 0.05 + 3.95 * i / m, y = 0.05 + 3.95 * j / m;
        const auto r = residual_hyperbolic(x, y, pair);
        worst = std::max({worst, std::fabs(r[0]), std::fabs(r[1])});
      }
    out.push_back(ResidualReport::make(
        pair == HyperbolicPair::FR1 ? "hyperbolic_f_r1" : "hyperbolic_h_r2",
        m * m, worst, 1e-6, {{"h", 1e-5}}));
  }
  double init = 0.0, compat = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = 5.0 * i / 100.0;
    init = std::max({init, std::fabs(f_fn(x, 0.0) - f_initial(x)),
                     std::fabs(r1_fn(x, 0.0) - r1_initial(x)),
                     std::fabs(h_fn(x, 0.0) - h_initial(x)),
                     std::fabs(r2_fn(x, 0.0) - r2_initial(x))});
    compat = std::max({compat, std::fabs(f_fn(0.0, x) - r1_fn(0.0, x)),
                       std::fabs(h_fn(0.0, x) - r2_fn(0.0, x))});
  }
  out.push_back(ResidualReport::make("hyperbolic_initial", 101, init, 1e-12));
  out.push_back(ResidualReport::make("hyperbolic_compatibility", 101, compat, 1e-12));
  return out;
}

std::vector<ResidualReport> suite_combgaps(const SuiteOptions& o) {
  const auto pts = hjb_points(o);
  double neg = 0.0, attained = 0.0, sym = 0.0;
  std::int64_t argmax_fail = 0, distinct = 0;
  for (const auto& p : pts) {
    const RegretState x = from_array(p);
    const auto g = comb_gaps(x);
    for (int m = 0; m < 16; ++m) {
      neg = std::max(neg, -g[m]);
      sym = std::max(sym, std::fabs(g[m] - g[15 - m]));
    }
    const ExpertSubset c = comb_set(x);
    attained = std::max({attained, std::fabs(g[c.mask()]),
                         std::fabs(g[c.complement().mask()])});
    if (tied_pairs(x).empty()) {
      ++distinct;
      const auto am = hamiltonian_argmax(x, 1e-8);
      const bool has = std::find(am.begin(), am.end(), c) != am.end() &&
                       std::find(am.begin(), am.end(), c.complement()) != am.end();
      if (!has) ++argmax_fail;
    }
  }
  const auto n = static_cast<std::int64_t>(pts.size());
  return {
      ResidualReport::make("comb_gaps_nonnegative", n, neg, 1e-9),
      ResidualReport::make("comb_gap_attained", n, attained, 1e-8),
      ResidualReport::make("comb_gap_complement_symmetry", n, sym, 1e-10),
      ResidualReport::make("argmax_contains_comb", distinct,
                           static_cast<double>(argmax_fail), 0.0),
  };
}

std::vector<ResidualReport> suite_regularity(const SuiteOptions& o) {
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const int per = o.quick ? 30 : 100;
  double grad = 0.0, hess = 0.0;
  std::int64_t samples = 0;
  for (int locus = 0; locus < 3; ++locus) {
    for (int k = 0; k < per; ++k) {
      std::array<double, 4> s{U(rng), U(rng), U(rng), U(rng)};
      std::sort(s.begin(), s.end());
      s[locus + 1] = s[locus];
      const RegretState x = from_array(s);
      grad = std::max(grad, check_regularity(x).max_residual);
      hess = std::max(hess, check_hessian_continuity(x).max_residual);
      ++samples;
    }
  }
  std::vector<ResidualReport> out;
  out.push_back(ResidualReport::make("regularity_gradient", samples, grad, 1e-8));
  out.push_back(ResidualReport::make("regularity_hessian", samples, hess, 1e-5,
                                     {{"eps", 1e-7}}));

  std::uniform_real_distribution<double> Y(0.0, 3.0);
  double diag = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double a = Y(rng), b = Y(rng);
    diag = std::max(diag, std::fabs(v3(GapVector{a, b, a}) - V2d(a, b)));
  }
  out.push_back(ResidualReport::make("diagonal_identity", 100, diag, 1e-12));

  const int n = o.quick ? 200 : 1000;
  double symm = 0.0, trans = 0.0, mono = 0.0, simplex = 0.0, rows = 0.0;
  for (int k = 0; k < n; ++k) {
    std::array<double, 4> p{U(rng), U(rng), U(rng), U(rng)};
    const RegretState x = from_array(p);
    const double u = u4(x);
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
      symm = std::max(symm, std::fabs(u4({p[perm[0]], p[perm[1]], p[perm[2]],
                                          p[perm[3]]}) - u));
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double lam : {-5.0, 0.3, 10.0})
      trans = std::max(trans, std::fabs(u4(x.translated(lam)) - u - lam));
    for (int i = 0; i < 4; ++i)
      for (double t : {1e-3, 0.1, 1.0})
        mono = std::max(mono, u - u4(x.shifted(i, t)));
    const Vec4 g = u4_grad(x);
    double sum = 0.0;
    for (double gi : g) {
      simplex = std::max({simplex, -gi, gi - 1.0});
      sum += gi;
    }
    simplex = std::max(simplex, std::fabs(sum - 1.0));
    const Mat4 h = u4_hess(x);
    for (int i = 0; i < 4; ++i) {
      double r = 0.0;
      for (int j = 0; j < 4; ++j) {
        r += h[i][j];
        rows = std::max(rows, std::fabs(h[i][j] - h[j][i]));
      }
      rows = std::max(rows, std::fabs(r));
    }
  }
  out.push_back(ResidualReport::make("symmetry", n, symm, 1e-12));
  out.push_back(ResidualReport::make("translation", n, trans, 1e-12));
  out.push_back(ResidualReport::make("monotonicity", n, std::max(mono, 0.0), 1e-12));
  out.push_back(ResidualReport::make("gradient_simplex", n, std::max(simplex, 0.0), 1e-10));
  out.push_back(ResidualReport::make("hessian_symmetric_rows", n, rows, 1e-10));
  return out;
}

nlohmann::json table_json(const ConvergenceTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"delta", r.delta}, {"radius", r.radius}, {"value", r.value},
                    {"target", r.target}, {"error", r.error},
                    {"iterations", r.iterations}, {"seconds", r.seconds}});
  return rows;
}

std::vector<ResidualReport> suite_convergence(const SuiteOptions& o) {
  std::vector<ResidualReport> out;
  const double scale = o.quick ? 5.0 : 8.0;
  const double tol = 1e-8;
  const std::vector<double> d3 = o.quick ? std::vector<double>{0.16, 0.04}
                                         : std::vector<double>{0.16, 0.04, 0.01};
  const std::vector<double> d4{0.16, 0.04};

  const ConvergenceTable t3 = convergence_table(3, d3, scale, tol, o.threads);
  const ConvergenceTable t4 = convergence_table(4, d4, scale, tol, o.threads);
  out.push_back(t3.report);
  out.push_back(t4.report);
  out.push_back(ResidualReport::make("convergence_n3_final", 1,
                                     std::fabs(t3.rows.back().error), 0.1,
                                     {{"delta", t3.rows.back().delta}}));
  out.push_back(ResidualReport::make("convergence_n4_final", 1,
                                     std::fabs(t4.rows.back().error), 0.15,
                                     {{"delta", t4.rows.back().delta}}));

  // Truncation sensitivity and the balanced-comb best response at the last
  // N = 4 delta.
  const double delta = d4.back();
  const int r0 = t4.rows.back().radius;
  const int r1 = static_cast<int>(std::ceil(1.5 * r0));
  SolveOptions so;
  so.tol = tol;
  so.threads = o.threads;
  const ValueGrid big = solve_vdelta(4, StoppingParam(delta), r1, so);
  const double sd = std::sqrt(delta);
  const std::array<long long, 4> zero{};
  const double v_big = sd * big.lattice_value(zero);
  out.push_back(ResidualReport::make(
      "truncation_sensitivity", 1, std::fabs(v_big - t4.rows.back().value), 0.02,
      {{"delta", delta}, {"radius", r0}, {"radius_large", r1},
       {"value", t4.rows.back().value}, {"value_large", v_big}}));

  const ValueGrid under = solve_underline_u(StoppingParam(delta), r0, so);
  const double v_under = sd * under.lattice_value(zero);
  out.push_back(ResidualReport::make(
      "underline_vs_vdelta", 1, std::fabs(v_under - t4.rows.back().value), 0.05,
      {{"delta", delta}, {"radius", r0}, {"underline", v_under},
       {"vdelta", t4.rows.back().value}}));
  return out;
}

}  // namespace

ResidualReport ResidualReport::make(std::string id, std::int64_t samples,
                                    double max_residual, double tolerance,
                                    nlohmann::json metadata) {
  ResidualReport r;
  r.id = std::move(id);
  r.samples = samples;
  r.max_residual = max_residual;
  r.tolerance = tolerance;
  r.pass = max_residual <= tolerance;
  r.metadata = std::move(metadata);
  return r;
}

void to_json(nlohmann::json& j, const ResidualReport& r) {
  j = nlohmann::json{{"id", r.id},
                     {"samples", r.samples},
                     {"max_residual", r.max_residual},
                     {"tolerance", r.tolerance},
                     {"pass", r.pass},
                     {"metadata", r.metadata}};
}

double residual_hjb(const RegretState& x) {
  if (x.size() != 4) throw std::invalid_argument("residual_hjb: N must be 4");
  const Mat4 h = u4_hess(x);
  double best = -INFINITY;
  for (std::uint32_t m = 0; m < 16; ++m)
    best = std::max(best, quadratic_form(h, ExpertSubset(m, 4)));
  return u4(x) - 0.5 * best - phi(x);
}

double residual_v_pde(const GapVector& y, double h) {
  if (y.size() != 3) throw std::invalid_argument("residual_v_pde: expected 3 gaps");
  for (int k = 0; k < 3; ++k)
    if (y[k] < h)
      throw std::invalid_argument("residual_v_pde: point too close to a face");
  const std::array<double, 3> d{1.0, -1.0, 1.0};
  const double v0 = v3(y);
  auto second = [&](double s) {
    std::array<double, 3> p{}, m{};
    for (int k = 0; k < 3; ++k) {
      p[k] = y[k] + s * d[k];
      m[k] = y[k] - s * d[k];
    }
    return (v_at(p) - 2.0 * v0 + v_at(m)) / (s * s);
  };
  const double rich = (4.0 * second(0.5 * h) - second(h)) / 3.0;
  return v0 - 0.5 * rich;
}

double residual_reflection(const GapVector& y, int face, double h) {
  if (y.size() != 3 || face < 0 || face > 2)
    throw std::invalid_argument("residual_reflection: bad face");
  if (y[face] != 0.0)
    throw std::invalid_argument("residual_reflection: point is not on the face");
  const double d1 = v_partial(y, 0, h), d2 = v_partial(y, 1, h),
               d3 = v_partial(y, 2, h);
  switch (face) {
    case 2: return d3 - 0.5 * d2 + 0.5;
    case 1: return d2 - 0.5 * (d1 + d3);
    default: return d1 - 0.5 * d2;
  }
}

std::array<double, 2> residual_hyperbolic(double x, double y, HyperbolicPair pair,
                                          double h) {
  if (!(x > 0.0)) throw std::invalid_argument("residual_hyperbolic: x must be > 0");
  if (!(y >= 0.0)) throw std::invalid_argument("residual_hyperbolic: y must be >= 0");
  const Fn2 F = pair == HyperbolicPair::FR1 ? &f_fn : &h_fn;
  const Fn2 R = pair == HyperbolicPair::FR1 ? &r1_fn : &r2_fn;
  const double f = F(x, y), r = R(x, y);
  const double coth = 1.0 / std::tanh(x), csch = 1.0 / std::sinh(x);
  const double e1 = partial_x(F, x, y, h) - 2.0 * partial_y(F, x, y, h) -
                    2.0 * coth * f + 2.0 * csch * r;
  const double e2 = partial_x(R, x, y, h) + 2.0 * csch * f - 2.0 * coth * r;
  return {e1, e2};
}

std::array<double, 16> comb_gaps(const RegretState& x) {
  if (x.size() != 4) throw std::invalid_argument("comb_gaps: N must be 4");
  const Mat4 h = u4_hess(x);
  const double base = u4(x) - phi(x);
  std::array<double, 16> g{};
  for (std::uint32_t m = 0; m < 16; ++m)
    g[m] = base - 0.5 * quadratic_form(h, ExpertSubset(m, 4));
  return g;
}

ResidualReport check_regularity(const RegretState& x) {
  if (x.size() != 4) throw std::invalid_argument("check_regularity: N must be 4");
  const Vec4 g = u4_grad(x);
  const auto pairs = tied_pairs(x);
  double worst = 0.0;
  for (auto [i, j] : pairs) worst = std::max(worst, std::fabs(g[i] - g[j]));
  return ResidualReport::make("regularity_gradient",
                              static_cast<std::int64_t>(pairs.size()), worst, 1e-8);
}

ResidualReport check_hessian_continuity(const RegretState& x, double eps) {
  if (x.size() != 4)
    throw std::invalid_argument("check_hessian_continuity: N must be 4");
  const auto pairs = tied_pairs(x);
  const Mat4 h0 = u4_hess(x);
  double worst = 0.0;
  for (auto [i, j] : pairs) {
    for (double s : {eps, -eps}) {
      const Mat4 h = u4_hess(x.shifted(i, s).shifted(j, -s));
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          worst = std::max(worst, std::fabs(h[a][b] - h0[a][b]));
    }
  }
  return ResidualReport::make("regularity_hessian",
                              static_cast<std::int64_t>(pairs.size()), worst, 1e-5,
                              {{"eps", eps}});
}

std::vector<std::array<double, 4>> sobol_points(int dim, std::size_t count,
                                                double lo, double hi) {
  if (dim < 1 || dim > 4) throw std::invalid_argument("sobol_points: dim in 1..4");
  boost::random::sobol gen(static_cast<std::size_t>(dim));
  std::vector<std::array<double, 4>> out(count);
  for (auto& p : out)
    for (int d = 0; d < dim; ++d)
      p[d] = lo + (hi - lo) * std::ldexp(static_cast<double>(gen()), -64);
  return out;
}

std::vector<std::array<double, 4>> locus_points(std::size_t per_locus, double lo,
                                                double hi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(lo, hi);
  std::uniform_real_distribution<double> near(-1e-3, 1e-3);
  // Each locus is a partition of the four coordinates into tied groups.
  std::vector<std::array<int, 4>> groups;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      std::array<int, 4> g{0, 1, 2, 3};
      g[j] = i;
      groups.push_back(g);
    }
  for (int skip = 0; skip < 4; ++skip) {
    std::array<int, 4> g{};
    const int rep = skip == 0 ? 1 : 0;
    for (int k = 0; k < 4; ++k) g[k] = k == skip ? skip : rep;
    groups.push_back(g);
  }
  groups.push_back({0, 1, 0, 1});
  groups.push_back({0, 0, 2, 2});
  groups.push_back({0, 1, 1, 0});
  groups.push_back({0, 0, 0, 0});

  std::vector<std::array<double, 4>> out;
  out.reserve(groups.size() * per_locus);
  for (const auto& g : groups) {
    for (std::size_t k = 0; k < per_locus; ++k) {
      std::array<double, 4> base{U(rng), U(rng), U(rng), U(rng)};
      std::array<double, 4> p{};
      const bool exact = k % 2 == 0;
      for (int i = 0; i < 4; ++i) {
        p[i] = base[g[i]];
        if (!exact && g[i] != i) p[i] = std::clamp(p[i] + near(rng), lo, hi);
      }
      out.push_back(p);
    }
  }
  return out;
}

ConvergenceTable convergence_table(int n, const std::vector<double>& deltas,
                                   double radius_scale, double tol, int threads) {
  if (deltas.empty()) throw std::invalid_argument("convergence_table: no deltas");
  for (std::size_t k = 1; k < deltas.size(); ++k)
    if (!(deltas[k] < deltas[k - 1]))
      throw std::invalid_argument("convergence_table: deltas must decrease");
  ConvergenceTable t;
  t.n = n;
  std::vector<double> zero_state(n, 0.0);
  const double target = continuum_value(RegretState(zero_state));
  SolveOptions so;
  so.tol = tol;
  so.threads = threads;
  bool decreasing = true;
  double worst_increase = 0.0;
  for (double d : deltas) {
    ConvergenceRow row;
    row.delta = d;
    row.radius = std::max(4, static_cast<int>(std::ceil(radius_scale / std::sqrt(d) - 1e-9)));
    const auto t0 = std::chrono::steady_clock::now();
    const ValueGrid g = solve_vdelta(n, StoppingParam(d), row.radius, so);
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::array<long long, 4> z{};
    row.value = std::sqrt(d) * g.lattice_value(std::span<const long long>(z.data(), n));
    row.target = target;
    row.error = row.value - target;
    row.iterations = g.iterations;
    if (!t.rows.empty()) {
      const double inc = std::fabs(row.error) - std::fabs(t.rows.back().error);
      if (!(inc < 0.0)) decreasing = false;
      worst_increase = std::max(worst_increase, inc);
    }
    t.rows.push_back(row);
  }
  // Residual: the largest step-to-step growth of |error| (must stay < 0).
  t.report = ResidualReport::make("convergence_n" + std::to_string(n),
                                  static_cast<std::int64_t>(deltas.size()),
                                  decreasing ? 0.0 : std::max(worst_increase, 1e-300),
                                  0.0, {{"rows", table_json(t)}});
  return t;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "hjb", "vpde", "reflections", "hyperbolic", "combgaps", "regularity",
      "convergence", "all"};
  return names;
}

std::vector<ResidualReport> run_suite(const std::string& suite,
                                      const SuiteOptions& opts) {
  if (suite == "hjb") return suite_hjb(opts);
  if (suite == "vpde") return suite_vpde(opts);
  if (suite == "reflections") return suite_reflections(opts);
  if (suite == "hyperbolic") return suite_hyperbolic(opts);
  if (suite == "combgaps") return suite_combgaps(opts);
  if (suite == "regularity") return suite_regularity(opts);
  if (suite == "convergence") return suite_convergence(opts);
  if (suite == "all") {
    std::vector<ResidualReport> all;
    for (const auto& name : suite_names()) {
      if (name == "all") continue;
      auto part = run_suite(name, opts);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  std::string valid;
  for (const auto& n : suite_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown suite '" + suite + "'; valid: " + valid);
}

void print_summary(std::ostream& os, const std::vector<ResidualReport>& reports) {
  std::size_t width = 5;
  for (const auto& r : reports) width = std::max(width, r.id.size());
  const auto flags = os.flags();
  os << std::left << std::setw(static_cast<int>(width)) << "check" << "  "
     << std::right << std::setw(8) << "samples" << "  " << std::setw(12)
     << "max_resid" << "  " << std::setw(10) << "tol" << "  status\n";
  int failed = 0;
  for (const auto& r : reports) {
    os << std::left << std::setw(static_cast<int>(width)) << r.id << "  "
       << std::right << std::setw(8) << r.samples << "  " << std::setw(12)
       << std::setprecision(3) << std::scientific << r.max_residual << "  "
       << std::setw(10) << r.tolerance << "  " << (r.pass ? "PASS" : "FAIL")
       << '\n';
    os.flags(flags);
    if (!r.pass) ++failed;
  }
  os << reports.size() - failed << "/" << reports.size() << " checks passed\n";
}

}  // namespace expertgame
