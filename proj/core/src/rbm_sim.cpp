#include "expertgame/rbm_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "expertgame/closed_form.hpp"
#include "expertgame/rng.hpp"

namespace expertgame {

namespace {

constexpr int kMaxPushSweeps = 10000;
constexpr double kPushTol = 1e-15;

std::int64_t step_count(const McOptions& o) {
  if (!(o.dt > 0.0) || !(o.horizon > 0.0))
    throw std::invalid_argument("rbm: dt and horizon must be > 0");
  if (o.n_paths < 1) throw std::invalid_argument("rbm: n_paths must be >= 1");
  return static_cast<std::int64_t>(std::llround(o.horizon / o.dt));
}

struct PathOutcome {
  double disc;
  double disc_integral;
};

PathOutcome run_path(std::span<const double> y0, const ReflectionSpec& spec,
                     const McOptions& o, std::int64_t steps, std::uint64_t index) {
  Stream rng = make_stream(o.seed, index);
  std::normal_distribution<double> normal;
  const double sdt = std::sqrt(o.dt);
  RbmPath p = start_path(y0, spec);
  for (std::int64_t k = 0; k < steps; ++k) p = step(p, o.dt, sdt * normal(rng), spec);
  return {p.disc, p.disc_integral};
}

template <typename Fn>
void for_paths(std::int64_t n, int threads, Fn&& fn) {
  const std::size_t count = static_cast<std::size_t>(n);
  const std::size_t t = std::min<std::size_t>(std::max(1, threads), count);
  if (t <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < t; ++k) {
    const std::size_t lo = count * k / t, hi = count * (k + 1) / t;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void mean_se(const std::vector<double>& v, double& mean, double& se) {
  const double n = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

}  // namespace

ReflectionSpec ReflectionSpec::default3() {
  ReflectionSpec s;
  s.d = 3;
  s.R = {{{1.0, -0.5, 0.0}, {-0.5, 1.0, -0.5}, {0.0, -0.5, 1.0}}};
  s.drive = {1.0, -1.0, 1.0};
  s.target = 2;
  return s;
}

ReflectionSpec ReflectionSpec::default2() {
  ReflectionSpec s;
  s.d = 2;
  s.R = {{{1.0, -0.5, 0.0}, {-1.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  s.drive = {1.0, -1.0, 0.0};
  s.target = 0;
  return s;
}

Mat3 ReflectionSpec::gamma() const {
  Mat3 g{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g[i][j] = drive[i] * drive[j];
  return g;
}

void ReflectionSpec::validate() const {
  if (d != 2 && d != 3)
    throw std::invalid_argument("ReflectionSpec: dimension must be 2 or 3");
  if (target < 0 || target >= d)
    throw std::invalid_argument("ReflectionSpec: target face out of range");
  for (int i = 0; i < d; ++i) {
    if (R[i][i] != 1.0)
      throw std::invalid_argument("ReflectionSpec: R must have unit diagonal");
    for (int j = 0; j < d; ++j)
      if (!std::isfinite(R[i][j]))
        throw std::invalid_argument("ReflectionSpec: non-finite R");
  }
  // For M = |R - I| >= 0, rho(M) < 1 iff every leading principal minor of
  // I - M is positive.
  Mat3 a{};
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[i][j] = (i == j ? 1.0 : 0.0) - std::fabs(R[i][j] - (i == j ? 1.0 : 0.0));
  const double m1 = a[0][0];
  const double m2 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  double m3 = 1.0;
  if (d == 3)
    m3 = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0))
    throw std::invalid_argument(
        "ReflectionSpec: spectral radius of |R - I| must be < 1");
}

PushResult skorokhod_push(const Vec3& y_free, const ReflectionSpec& spec) {
  const int d = spec.d;
  PushResult out;
  bool inside = true;
  for (int i = 0; i < d; ++i) {
    if (!std::isfinite(y_free[i]))
      throw std::invalid_argument("skorokhod_push: non-finite position");
    if (y_free[i] < 0.0) inside = false;
  }
  if (inside) {
    out.y = y_free;
    return out;
  }
  Vec3 dl{}, next{};
  for (int sweep = 1; sweep <= kMaxPushSweeps; ++sweep) {
    double change = 0.0;
    for (int i = 0; i < d; ++i) {
      double r = -y_free[i];
      for (int j = 0; j < d; ++j)
        if (j != i) r -= spec.R[i][j] * dl[j];
      next[i] = std::max(0.0, r / spec.R[i][i]);
      change = std::max(change, std::fabs(next[i] - dl[i]));
    }
    dl = next;
    if (change <= kPushTol * (1.0 + std::fabs(dl[0]) + std::fabs(dl[1]) + std::fabs(dl[2]))) {
      out.iterations = sweep;
      out.dlambda = dl;
      for (int i = 0; i < d; ++i) {
        double y = y_free[i];
        for (int j = 0; j < d; ++j) y += spec.R[i][j] * dl[j];
        out.y[i] = dl[i] > 0.0 ? 0.0 : std::max(0.0, y);
      }
      return out;
    }
  }
  throw NumericalError("skorokhod_push: fixed point did not converge");
}

RbmPath start_path(std::span<const double> y0, const ReflectionSpec& spec) {
  if (static_cast<int>(y0.size()) != spec.d)
    throw std::invalid_argument("start_path: dimension mismatch");
  RbmPath p;
  for (int i = 0; i < spec.d; ++i) {
    if (!(y0[i] >= 0.0) || !std::isfinite(y0[i]))
      throw std::invalid_argument("start_path: start must lie in the orthant");
    p.y[i] = y0[i];
  }
  return p;
}

RbmPath step(const RbmPath& path, double dt, double dW,
             const ReflectionSpec& spec) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
  Vec3 free{};
  for (int i = 0; i < spec.d; ++i) free[i] = path.y[i] + spec.drive[i] * dW;
  const PushResult push = skorokhod_push(free, spec);
  RbmPath out = path;
  out.y = push.y;
  for (int i = 0; i < spec.d; ++i) out.lambda[i] += push.dlambda[i];
  const double t1 = path.t + dt;
  out.disc += std::exp(-t1) * push.dlambda[spec.target];
  out.disc_integral +=
      (std::exp(-path.t) - std::exp(-t1)) * out.lambda[spec.target];
  out.t = t1;
  return out;
}

void to_json(nlohmann::json& j, const McEstimate& e) {
  j = nlohmann::json{{"mean", e.mean},       {"stderr", e.std_error},
                     {"n_paths", e.n_paths}, {"dt", e.dt},
                     {"horizon", e.horizon}};
}

McEstimate estimate_local_time_functional(std::span<const double> y0,
                                          const ReflectionSpec& spec,
                                          const McOptions& opts) {
  spec.validate();
  const std::int64_t steps = step_count(opts);
  start_path(y0, spec);
  std::vector<double> v(static_cast<std::size_t>(opts.n_paths));
  for_paths(opts.n_paths, opts.threads, [&](std::size_t i) {
    v[i] = 0.5 * run_path(y0, spec, opts, steps, i).disc;
  });
  McEstimate e;
  mean_se(v, e.mean, e.std_error);
  e.n_paths = opts.n_paths;
  e.dt = opts.dt;
  e.horizon = opts.horizon;
  return e;
}

McEstimate estimate_v_mc(const GapVector& y0, const McOptions& opts) {
  if (y0.size() != 3) throw std::invalid_argument("estimate_v_mc: expected 3 gaps");
  return estimate_local_time_functional(y0.values(), ReflectionSpec::default3(),
                                        opts);
}

McEstimate estimate_V_mc(double y1, double y2, const McOptions& opts) {
  const std::array<double, 2> y0{y1, y2};
  return estimate_local_time_functional(y0, ReflectionSpec::default2(), opts);
}

FormComparison compare_functional_forms(const GapVector& y0,
                                        const McOptions& opts) {
  const ReflectionSpec spec = ReflectionSpec::default3();
  const std::int64_t steps = step_count(opts);
  const std::size_t n = static_cast<std::size_t>(opts.n_paths);
  std::vector<double> a(n), b(n), diff(n);
  for_paths(opts.n_paths, opts.threads, [&](std::size_t i) {
    const PathOutcome o = run_path(y0.values(), spec, opts, steps, i);
    a[i] = 0.5 * o.disc;
    b[i] = 0.5 * o.disc_integral;
    diff[i] = a[i] - b[i];
  });
  FormComparison c;
  for (McEstimate* e : {&c.increment_form, &c.integral_form}) {
    e->n_paths = opts.n_paths;
    e->dt = opts.dt;
    e->horizon = opts.horizon;
  }
  mean_se(a, c.increment_form.mean, c.increment_form.std_error);
  mean_se(b, c.integral_form.mean, c.integral_form.std_error);
  double dm = 0.0;
  mean_se(diff, dm, c.diff_std_error);
  return c;
}

void write_path_csv(std::ostream& os, std::span<const double> y0,
                    const ReflectionSpec& spec, const McOptions& opts,
                    int stride) {
  spec.validate();
  if (stride < 1) throw std::invalid_argument("write_path_csv: stride must be >= 1");
  const std::int64_t steps = step_count(opts);
  Stream rng = make_stream(opts.seed, 0);
  std::normal_distribution<double> normal;
  const double sdt = std::sqrt(opts.dt);
  RbmPath p = start_path(y0, spec);
  os << "t";
  for (int i = 0; i < spec.d; ++i) os << ",y" << i + 1;
  for (int i = 0; i < spec.d; ++i) os << ",lambda" << i + 1;
  os << ",disc\n" << std::setprecision(17);
  auto row = [&] {
    os << p.t;
    for (int i = 0; i < spec.d; ++i) os << ',' << p.y[i];
    for (int i = 0; i < spec.d; ++i) os << ',' << p.lambda[i];
    os << ',' << p.disc << '\n';
  };
  row();
  for (std::int64_t k = 1; k <= steps; ++k) {
    p = step(p, opts.dt, sdt * normal(rng), spec);
    if (k % stride == 0 || k == steps) row();
  }
}

double v_tilde(const GapVector& y) {
  if (y.size() != 3) throw std::invalid_argument("v_tilde: expected 3 gaps");
  return 0.25 * (y[0] + 2.0 * y[1] + 3.0 * y[2]) + v3(y);
}

}  // namespace expertgame
