#include "expertgame/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace expertgame {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// arctanh(e^s) for s < 0 without the cancellation in 1 - e^s.
double arctanh_exp(double s) {
  return 0.5 * std::log((1.0 + std::exp(s)) / (-std::expm1(s)));
}

void require_size(const RegretState& x, int n, const char* fn) {
  if (x.size() != n)
    throw std::invalid_argument(std::string(fn) + ": expected " +
                                std::to_string(n) + " coordinates");
}

void require_nonnegative(double v, const char* fn) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(fn) +
                                ": argument must be finite and >= 0");
}

// Derivatives of
//   F(a, b, c) = arctan(e^-c) ch(a) ch(b) ch(c) + arctanh(e^-c) sh(a) sh(b) sh(c)
// on the closed chamber |a|, |b| <= c. Terms carrying arctanh(e^-c) or
// coth(c) vanish in the limit c -> 0 and are dropped below the cutoff.
struct CombKernel {
  double fa, fb, fc;
  double faa, fab, fac, fbc, fcc;  // f_bb == f_aa
};

CombKernel comb_kernel(double a, double b, double c) {
  const double ca = std::cosh(a), sa = std::sinh(a);
  const double cb = std::cosh(b), sb = std::sinh(b);
  const double cc = std::cosh(c), sc = std::sinh(c);
  const double at = std::atan(std::exp(-c));
  const bool singular = c < kArctanhCutoff;
  const double ath = singular ? 0.0 : arctanh_exp(-c);
  const double coth_term = singular ? 0.0 : sa * sb / std::tanh(c);

  CombKernel k{};
  k.fa = at * sa * cb * cc + ath * ca * sb * sc;
  k.fb = at * ca * sb * cc + ath * sa * cb * sc;
  k.fc = -0.5 * ca * cb + at * ca * cb * sc - 0.5 * sa * sb +
         ath * sa * sb * cc;
  k.faa = at * ca * cb * cc + ath * sa * sb * sc;
  k.fab = at * sa * sb * cc + ath * ca * cb * sc;
  k.fac = -0.5 * sa * cb + at * sa * cb * sc - 0.5 * ca * sb +
          ath * ca * sb * cc;
  k.fbc = -0.5 * ca * sb + at * ca * sb * sc - 0.5 * sa * cb +
          ath * sa * cb * cc;
  k.fcc = -0.5 * ca * cb * std::tanh(c) + at * ca * cb * cc -
          0.5 * coth_term + ath * sa * sb * sc;
  return k;
}

// Linear coordinates of the kernel as rows acting on sorted x.
constexpr Vec4 kDirA{kInvSqrt2, -kInvSqrt2, kInvSqrt2, -kInvSqrt2};
constexpr Vec4 kDirB{-kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2};
constexpr Vec4 kDirC{-kInvSqrt2, -kInvSqrt2, kInvSqrt2, kInvSqrt2};
constexpr Vec4 kDirD{0.0, 0.0, -kSqrt2, kSqrt2};

double dot(const Vec4& u, const Vec4& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3];
}

Vec4 ordered_grad(const Vec4& s) {
  const double a = dot(kDirA, s), b = dot(kDirB, s), c = dot(kDirC, s);
  const double d = dot(kDirD, s);
  const CombKernel k = comb_kernel(a, b, c);
  Vec4 g{0.0, 0.0, 0.0, 1.0};
  const double wd = -0.25 * kSqrt2 * std::cosh(d);
  for (int i = 0; i < 4; ++i) {
    g[i] += wd * kDirD[i] +
            0.5 * kSqrt2 * (k.fa * kDirA[i] + k.fb * kDirB[i] + k.fc * kDirC[i]);
  }
  return g;
}

Mat4 ordered_hess(const Vec4& s) {
  const double a = dot(kDirA, s), b = dot(kDirB, s), c = dot(kDirC, s);
  const double d = dot(kDirD, s);
  const CombKernel k = comb_kernel(a, b, c);
  const double wd = -0.25 * kSqrt2 * std::sinh(d);
  const double w = 0.5 * kSqrt2;
  Mat4 h{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double aa = kDirA[i] * kDirA[j], bb = kDirB[i] * kDirB[j];
      const double cc = kDirC[i] * kDirC[j];
      const double ab = kDirA[i] * kDirB[j] + kDirB[i] * kDirA[j];
      const double ac = kDirA[i] * kDirC[j] + kDirC[i] * kDirA[j];
      const double bc = kDirB[i] * kDirC[j] + kDirC[i] * kDirB[j];
      h[i][j] = wd * kDirD[i] * kDirD[j] +
                w * (k.faa * (aa + bb) + k.fcc * cc + k.fab * ab +
                     k.fac * ac + k.fbc * bc);
    }
  }
  return h;
}

// Large-gap form. With P = A ch p + B sh p - 1 and Q = A ch p - B sh p,
// A = arctan(e^-p), B = arctanh(e^-p), p = (y1 + 2 y2 + y3)/sqrt2:
//   v = (sqrt2/4) (e^{-sqrt2 y3} + ch(sqrt2 y3) P + ch(sqrt2 y1) Q).
// P and Q are O(e^-2p) and are summed as power series in e^-p, which avoids
// the cancellation between the sinh and cosh terms of the printed formula.
constexpr double kSeriesSwitch = 1.0;

struct GapSeries {
  double p, q, dp, dq, d2p, d2q;
};

GapSeries gap_series(double p) {
  const double e = std::exp(-p);
  const double e2 = e * e, e4 = e2 * e2;
  GapSeries s{};
  double pw = 1.0;
  for (int k = 0; k < 12; ++k) {
    const double den_q = (4.0 * k + 1.0) * (4.0 * k + 3.0);
    s.q += 2.0 * pw / den_q;
    s.dq -= (8.0 * k + 4.0) * pw / den_q;
    pw *= e4;
    const double kk = k + 1.0;
    const double den_p = 16.0 * kk * kk - 1.0;
    s.p -= 2.0 * pw / den_p;
    s.dp += 8.0 * kk * pw / den_p;
  }
  s.q *= e2;
  s.dq *= e2;
  s.d2p = s.p - 2.0 * e4 / (1.0 - e4);
  s.d2q = s.q + 1.0 / std::sinh(2.0 * p);
  return s;
}

double v3_series(double y1, double y2, double y3) {
  const GapSeries s = gap_series((y1 + 2.0 * y2 + y3) / kSqrt2);
  return kSqrt2 / 4.0 *
         (std::exp(-kSqrt2 * y3) + std::cosh(kSqrt2 * y3) * s.p +
          std::cosh(kSqrt2 * y1) * s.q);
}

// Gradient and Hessian of v in the gaps from the large-gap form.
void v3_series_derivatives(const std::array<double, 3>& y,
                           std::array<double, 3>& g,
                           std::array<std::array<double, 3>, 3>& h) {
  const GapSeries s = gap_series((y[0] + 2.0 * y[1] + y[2]) / kSqrt2);
  const std::array<double, 3> k{kInvSqrt2, kSqrt2, kInvSqrt2};
  const double e3 = std::exp(-kSqrt2 * y[2]);
  const double c3 = std::cosh(kSqrt2 * y[2]), s3 = std::sinh(kSqrt2 * y[2]);
  const double c1 = std::cosh(kSqrt2 * y[0]), s1 = std::sinh(kSqrt2 * y[0]);
  // First and second derivatives of e3, c3 (in y3) and c1 (in y1).
  const std::array<double, 3> de3{0.0, 0.0, -kSqrt2 * e3};
  const std::array<double, 3> dc3{0.0, 0.0, kSqrt2 * s3};
  const std::array<double, 3> dc1{kSqrt2 * s1, 0.0, 0.0};
  const double w = kSqrt2 / 4.0;
  for (int i = 0; i < 3; ++i) {
    g[i] = w * (de3[i] + dc3[i] * s.p + c3 * s.dp * k[i] + dc1[i] * s.q +
                c1 * s.dq * k[i]);
    for (int j = 0; j < 3; ++j) {
      const double d2e3 = (i == 2 && j == 2) ? 2.0 * e3 : 0.0;
      const double d2c3 = (i == 2 && j == 2) ? 2.0 * c3 : 0.0;
      const double d2c1 = (i == 0 && j == 0) ? 2.0 * c1 : 0.0;
      h[i][j] = w * (d2e3 + d2c3 * s.p + (dc3[i] * k[j] + dc3[j] * k[i]) * s.dp +
                     c3 * s.d2p * k[i] * k[j] + d2c1 * s.q +
                     (dc1[i] * k[j] + dc1[j] * k[i]) * s.dq +
                     c1 * s.d2q * k[i] * k[j]);
    }
  }
}

// u = x(4) + v(x2-x1, x3-x2, x4-x3) on sorted coordinates.
constexpr int kGapRow[3][2] = {{1, 0}, {2, 1}, {3, 2}};  // y_k = s[a] - s[b]

Vec4 ordered_grad_series(const Vec4& s) {
  const std::array<double, 3> y{s[1] - s[0], s[2] - s[1], s[3] - s[2]};
  std::array<double, 3> g{};
  std::array<std::array<double, 3>, 3> h{};
  v3_series_derivatives(y, g, h);
  Vec4 out{0.0, 0.0, 0.0, 1.0};
  for (int k = 0; k < 3; ++k) {
    out[kGapRow[k][0]] += g[k];
    out[kGapRow[k][1]] -= g[k];
  }
  return out;
}

Mat4 ordered_hess_series(const Vec4& s) {
  const std::array<double, 3> y{s[1] - s[0], s[2] - s[1], s[3] - s[2]};
  std::array<double, 3> g{};
  std::array<std::array<double, 3>, 3> h{};
  v3_series_derivatives(y, g, h);
  Mat4 out{};
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const double sign = (a == b) ? 1.0 : -1.0;
          out[kGapRow[k][a]][kGapRow[l][b]] += sign * h[k][l];
        }
  return out;
}

double chamber_c(const Vec4& s) { return (-s[0] - s[1] + s[2] + s[3]) / kSqrt2; }

Vec4 unrank(const RankedState& r, const Vec4& sorted_values) {
  Vec4 out{};
  for (int k = 0; k < r.n; ++k) out[r.perm[k]] = sorted_values[k];
  return out;
}

}  // namespace

RankedState rank(const RegretState& x) {
  RankedState r;
  r.n = x.size();
  for (int i = 0; i < r.n; ++i) r.perm[i] = i;
  // Stable on the original index: x_i == x_j with i < j keeps i first.
  std::stable_sort(r.perm.begin(), r.perm.begin() + r.n,
                   [&x](int i, int j) { return x[i] < x[j]; });
  for (int k = 0; k < r.n; ++k) r.sorted[k] = x[r.perm[k]];
  return r;
}

double phi(const RegretState& x) {
  return *std::max_element(x.begin(), x.end());
}

GapVector gaps(const RegretState& x) {
  const RankedState r = rank(x);
  std::array<double, 3> g{};
  for (int k = 0; k + 1 < r.n; ++k) g[k] = r.sorted[k + 1] - r.sorted[k];
  return GapVector(std::span<const double>(g.data(), r.n - 1));
}

double u4(const RegretState& x) {
  require_size(x, 4, "u4");
  const Vec4 v = rank(x).sorted;
  const double x1 = v[0], x2 = v[1], x3 = v[2], x4 = v[3];
  const double s = (x1 + x2 - x3 - x4) / kSqrt2;
  const double a = (x1 - x2 + x3 - x4) / kSqrt2;
  const double b = (-x1 + x2 + x3 - x4) / kSqrt2;
  const double c = (-x1 - x2 + x3 + x4) / kSqrt2;
  if (c > kSeriesSwitch) return x4 + v3_series(x2 - x1, x3 - x2, x4 - x3);

  double u = x4 - kSqrt2 / 4.0 * std::sinh(kSqrt2 * (x4 - x3));
  u += kSqrt2 / 2.0 * std::atan(std::exp(s)) * std::cosh(a) * std::cosh(b) *
       std::cosh(c);
  if (s <= -kArctanhCutoff) {
    u += kSqrt2 / 2.0 * arctanh_exp(s) * std::sinh(a) * std::sinh(b) *
         std::sinh(c);
  }
  return u;
}

double u3(const RegretState& x) {
  require_size(x, 3, "u3");
  const Vec4 v = rank(x).sorted;
  return v[2] + std::exp(kSqrt2 * (v[1] - v[2])) / (2.0 * kSqrt2) +
         std::exp(kSqrt2 * (2.0 * v[0] - v[1] - v[2])) / (6.0 * kSqrt2);
}

double u2(const RegretState& x) {
  require_size(x, 2, "u2");
  const Vec4 v = rank(x).sorted;
  return v[1] + std::exp(-kSqrt2 * (v[1] - v[0])) / (2.0 * kSqrt2);
}

double continuum_value(const RegretState& x) {
  switch (x.size()) {
    case 2: return u2(x);
    case 3: return u3(x);
    case 4: return u4(x);
    default: throw std::invalid_argument("continuum_value: N must be 2, 3 or 4");
  }
}

double continuum_gap_value(std::span<const double> g) {
  switch (g.size()) {
    case 1:
      return std::exp(-kSqrt2 * g[0]) / (2.0 * kSqrt2);
    case 2:
      return std::exp(-kSqrt2 * g[1]) / (2.0 * kSqrt2) +
             std::exp(-kSqrt2 * (2.0 * g[0] + g[1])) / (6.0 * kSqrt2);
    case 3:
      return v3(GapVector(g));
    default:
      throw std::invalid_argument("continuum_gap_value: 1 to 3 gaps");
  }
}

double v3(const GapVector& y) {
  if (y.size() != 3) throw std::invalid_argument("v3: expected 3 gaps");
  const double y1 = y[0], y2 = y[1], y3 = y[2];
  const double p = (y1 + 2.0 * y2 + y3) / kSqrt2;
  if (p > kSeriesSwitch) return v3_series(y1, y2, y3);
  const double m = (-y1 + y3) / kSqrt2;
  const double q = (y1 + y3) / kSqrt2;
  double v = -kSqrt2 / 4.0 * std::sinh(kSqrt2 * y3);
  v += kSqrt2 / 2.0 * std::atan(std::exp(-p)) * std::cosh(m) * std::cosh(p) *
       std::cosh(q);
  if (p >= kArctanhCutoff) {
    v += kSqrt2 / 2.0 * arctanh_exp(-p) * std::sinh(m) * std::sinh(p) *
         std::sinh(q);
  }
  return v;
}

double V2d(double y1, double y2) {
  require_nonnegative(y1, "V2d");
  require_nonnegative(y2, "V2d");
  return kSqrt2 / 2.0 * std::cosh(kSqrt2 * y1) * std::cosh(kSqrt2 * (y1 + y2)) *
             std::atan(std::exp(-kSqrt2 * (y1 + y2))) -
         kSqrt2 / 4.0 * std::sinh(kSqrt2 * y1);
}

double V1_fn(double x) {
  require_nonnegative(x, "V1_fn");
  const double ch = std::cosh(kSqrt2 * x);
  return std::atan(std::exp(-kSqrt2 * x)) * ch * ch / kSqrt2 -
         std::sinh(kSqrt2 * x) / (2.0 * kSqrt2);
}

double V2_fn(double x) {
  require_nonnegative(x, "V2_fn");
  return std::atan(std::exp(-kSqrt2 * x)) * std::cosh(kSqrt2 * x) / kSqrt2;
}

namespace {

// Shared pieces of f, r1, h, r2 in the variable z = x + y/2.
struct TraceTerms {
  double at, ath;    // arctan(e^-z), arctanh(e^-z) (0 at z = 0 by limit)
  double cz, sz;     // cosh z, sinh z
  double chy, shy;   // cosh(y/2), sinh(y/2)
};

TraceTerms trace_terms(double x, double y, const char* fn) {
  require_nonnegative(x, fn);
  require_nonnegative(y, fn);
  const double z = x + 0.5 * y;
  TraceTerms t{};
  t.at = std::atan(std::exp(-z));
  t.ath = z >= kArctanhCutoff ? arctanh_exp(-z) : 0.0;
  t.cz = std::cosh(z);
  t.sz = std::sinh(z);
  t.chy = std::cosh(0.5 * y);
  t.shy = std::sinh(0.5 * y);
  return t;
}

}  // namespace

double f_fn(double x, double y) {
  const TraceTerms t = trace_terms(x, y, "f_fn");
  return kInvSqrt2 * (t.at * t.cz * t.chy * t.chy) +
         kInvSqrt2 * (t.ath * t.sz * t.shy * t.shy - 0.5 * std::sinh(y));
}

double r1_fn(double x, double y) {
  const TraceTerms t = trace_terms(x, y, "r1_fn");
  return kInvSqrt2 * (t.at * t.cz * t.cz * t.chy) +
         kInvSqrt2 * (t.ath * t.sz * t.sz * t.shy - 0.5 * std::sinh(x + y));
}

double h_fn(double x, double y) {
  const TraceTerms t = trace_terms(x, y, "h_fn");
  return kInvSqrt2 * (t.at * t.cz * t.chy * t.chy - 0.5 -
                      std::exp(-2.0 * x) / 6.0) -
         kInvSqrt2 * t.ath * t.sz * t.shy * t.shy;
}

double r2_fn(double x, double y) {
  const TraceTerms t = trace_terms(x, y, "r2_fn");
  return kInvSqrt2 * (t.at * t.cz * t.cz * t.chy - 2.0 * std::cosh(x) / 3.0) -
         kInvSqrt2 * (t.ath * t.sz * t.sz * t.shy - std::sinh(x) / 6.0);
}

double f_initial(double x) {
  return kInvSqrt2 * std::atan(std::exp(-x)) * std::cosh(x);
}

double r1_initial(double x) {
  const double ch = std::cosh(x);
  return kInvSqrt2 * std::atan(std::exp(-x)) * ch * ch -
         std::sinh(x) / (2.0 * kSqrt2);
}

double h_initial(double x) {
  return kInvSqrt2 * std::atan(std::exp(-x)) * std::cosh(x) -
         (1.0 + std::exp(-2.0 * x) / 3.0) / (2.0 * kSqrt2);
}

double r2_initial(double x) {
  const double ch = std::cosh(x);
  return kInvSqrt2 * std::atan(std::exp(-x)) * ch * ch -
         std::sinh(x) / (2.0 * kSqrt2) - 2.0 / (3.0 * kSqrt2) * std::exp(-x);
}

Vec4 u4_grad(const RegretState& x) {
  require_size(x, 4, "u4_grad");
  const RankedState r = rank(x);
  return unrank(r, chamber_c(r.sorted) > kSeriesSwitch
                       ? ordered_grad_series(r.sorted)
                       : ordered_grad(r.sorted));
}

Mat4 u4_hess(const RegretState& x) {
  require_size(x, 4, "u4_hess");
  const RankedState r = rank(x);
  const Mat4 hs = chamber_c(r.sorted) > kSeriesSwitch
                      ? ordered_hess_series(r.sorted)
                      : ordered_hess(r.sorted);
  Mat4 h{};
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) h[r.perm[k]][r.perm[l]] = hs[k][l];
  return h;
}

Vec4 continuum_grad(const RegretState& x) {
  const RankedState r = rank(x);
  const Vec4& s = r.sorted;
  Vec4 g{};
  switch (x.size()) {
    case 2: {
      const double e = std::exp(-kSqrt2 * (s[1] - s[0]));
      g = {0.5 * e, 1.0 - 0.5 * e, 0.0, 0.0};
      break;
    }
    case 3: {
      const double e1 = std::exp(kSqrt2 * (s[1] - s[2]));
      const double e2 = std::exp(kSqrt2 * (2.0 * s[0] - s[1] - s[2]));
      g = {e2 / 3.0, 0.5 * e1 - e2 / 6.0, 1.0 - 0.5 * e1 - e2 / 6.0, 0.0};
      break;
    }
    case 4:
      g = chamber_c(s) > kSeriesSwitch ? ordered_grad_series(s)
                                       : ordered_grad(s);
      break;
    default:
      throw std::invalid_argument("continuum_grad: N must be 2, 3 or 4");
  }
  return unrank(r, g);
}

double taylor_u4_origin(const RegretState& x) {
  require_size(x, 4, "taylor_u4_origin");
  const double pi = std::numbers::pi;
  double sum = 0.0, squares = 0.0, cross = 0.0;
  for (int i = 0; i < 4; ++i) {
    sum += x[i];
    squares += x[i] * x[i];
    for (int j = i + 1; j < 4; ++j) cross += x[i] * x[j];
  }
  return pi / (4.0 * kSqrt2) + 0.25 * sum +
         3.0 * pi / (16.0 * kSqrt2) * (squares - 2.0 / 3.0 * cross);
}

double quadratic_form(const Mat4& h, ExpertSubset j) {
  double q = 0.0;
  for (int a = 0; a < j.universe(); ++a) {
    if (!j.contains(a)) continue;
    for (int b = 0; b < j.universe(); ++b)
      if (j.contains(b)) q += h[a][b];
  }
  return q;
}

CombChoice comb_choice(const RegretState& x) {
  require_size(x, 4, "comb_choice");
  const RankedState r = rank(x);
  return {r.perm[3], r.perm[1]};
}

ExpertSubset comb_set(const RegretState& x) {
  const CombChoice c = comb_choice(x);
  return ExpertSubset::of({c.leader, c.second}, 4);
}

std::vector<ExpertSubset> hamiltonian_argmax(const RegretState& x,
                                             double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("hamiltonian_argmax: tol must be > 0");
  const Mat4 h = u4_hess(x);
  std::array<double, 16> q{};
  double best = -INFINITY;
  for (std::uint32_t m = 0; m < 16; ++m) {
    q[m] = quadratic_form(h, ExpertSubset(m, 4));
    best = std::max(best, q[m]);
  }
  std::vector<ExpertSubset> out;
  for (std::uint32_t m = 0; m < 16; ++m)
    if (q[m] >= best - tol) out.emplace_back(m, 4);
  return out;
}

}  // namespace expertgame
