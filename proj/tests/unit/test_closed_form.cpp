#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "expertgame/closed_form.hpp"
#include "expertgame/verify.hpp"

namespace eg = expertgame;

namespace {

const double kSqrt2 = std::numbers::sqrt2;
const double kU0 = std::numbers::pi / (4.0 * kSqrt2);

// Reference values from 40-60 digit evaluations of the printed formulas.
struct GapOracle {
  double y1, y2, y3, v;
};
constexpr GapOracle kV3Oracle[] = {
    {0.5, 0.5, 0.5, 0.19168535603446716417},
    {1.0, 0.2, 2.0, 0.025060546776430674578},
    {8.0, 8.0, 8.0, 4.3149308037212099047e-06},
    {0.0, 12.0, 12.0, 1.5074164491522013885e-8},
    {3.0, 5.0, 7.0, 0.000017748395030453514985},
    {12.0, 0.0, 0.0, 0.47140452079103182984},
    {0.0, 0.0, 20.0, 2.9435543680666036814e-13},
    {2.5, 0.1, 9.0, 1.3127521811417780185e-6},
};

// u - Phi - (1/2) e_J^T H e_J at (0.1, 0.2, 0.3, 0.4), by mask.
constexpr double kGapsAtRamp[16] = {
    0.429648101114, 0.236752755201, 0.152901244077, 0.0482249414289,
    0.054441447333, 0.0,            0.0,            0.0337775959328,
    0.0337775959328, 0.0,           0.0,            0.054441447333,
    0.0482249414289, 0.152901244077, 0.236752755201, 0.429648101114};

eg::RegretState random_state(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return {d(rng), d(rng), d(rng), d(rng)};
}

double max_abs(const eg::Mat4& a, const eg::Mat4& b) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

}  // namespace

TEST(Rank, SortsAndKeepsLowerIndexFirstOnTies) {
  auto r = eg::rank({1, 2, 3, 4});
  EXPECT_EQ(r.perm, (std::array<int, 4>{0, 1, 2, 3}));
  r = eg::rank({0, 0, 0, 0});
  EXPECT_EQ(r.perm, (std::array<int, 4>{0, 1, 2, 3}));
  r = eg::rank({5, 1, 5, 1});
  EXPECT_EQ(r.sorted, (eg::Vec4{1, 1, 5, 5}));
  EXPECT_EQ(r.perm, (std::array<int, 4>{1, 3, 0, 2}));
}

TEST(Phi, IsTheMaximum) {
  EXPECT_EQ(eg::phi({1, 2, 3, 4}), 4.0);
  EXPECT_EQ(eg::phi({0, 0, 0, 0}), 0.0);
  EXPECT_EQ(eg::phi({-3, -1, -2, -5}), -1.0);
}

TEST(RegretState, RejectsBadInput) {
  EXPECT_THROW(eg::RegretState({1.0}), std::invalid_argument);
  EXPECT_THROW(eg::RegretState({1, 2, 3, 4, 5}), std::invalid_argument);
  EXPECT_THROW(eg::RegretState({0.0, NAN}), std::invalid_argument);
  EXPECT_THROW(eg::GapVector({-0.1, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(eg::u4({0, 0, 0}), std::invalid_argument);
}

TEST(U4, OriginAndTranslation) {
  EXPECT_NEAR(eg::u4({0, 0, 0, 0}), kU0, 1e-15);
  EXPECT_NEAR(eg::u4({1.7, 1.7, 1.7, 1.7}), kU0 + 1.7, 1e-14);
}

TEST(U4, DecomposesIntoPhiPlusV3) {
  eg::RegretState x{0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(eg::u4(x), 0.82964810111445397, 1e-14);
  EXPECT_NEAR(eg::u4(x), eg::phi(x) + eg::v3(eg::gaps(x)), 1e-12);
}

TEST(U4, SpreadOutStates) {
  EXPECT_NEAR(eg::u4({-3, 0.5, 2, 6}), 6.0012410514051498703, 1e-13);
  EXPECT_NEAR(eg::u4({1.5, -2, 0.25, -0.75}), 1.5615798054464880735, 1e-13);
}

TEST(U4, NearlyAllEqualStaysFinite) {
  for (double e : {1e-13, 1e-11, 1e-9, 1e-7}) {
    double u = eg::u4({0, e, 2 * e, 3 * e});
    EXPECT_TRUE(std::isfinite(u));
    EXPECT_NEAR(u, kU0, 1e-6);
  }
}

TEST(U3, Values) {
  EXPECT_NEAR(eg::u3({0, 0, 0}), 2.0 / (3.0 * kSqrt2), 1e-15);
  EXPECT_NEAR(eg::u3({0.8, 0.8, 0.8}), 2.0 / (3.0 * kSqrt2) + 0.8, 1e-14);
  EXPECT_NEAR(eg::u3({-10, -10, 0}), 3.400496086726152718e-7, 1e-18);
}

TEST(U2, OriginAndDecay) {
  EXPECT_NEAR(eg::u2({0, 0}), 1.0 / (2.0 * kSqrt2), 1e-15);
  EXPECT_NEAR(eg::u2({0, 20}), 20.0, 1e-12);
}

TEST(V3, FrozenReferenceValues) {
  for (const auto& o : kV3Oracle) {
    double v = eg::v3({o.y1, o.y2, o.y3});
    EXPECT_NEAR(v, o.v, 1e-13 + 1e-12 * std::abs(o.v))
        << o.y1 << "," << o.y2 << "," << o.y3;
  }
  EXPECT_NEAR(eg::v3({0, 0, 0}), kU0, 1e-15);
  EXPECT_LT(eg::v3({8, 8, 8}), 1e-3);
}

TEST(V3, ContinuousAcrossSeriesSwitch) {
  // p = (y1 + 2 y2 + y3)/sqrt2 crosses 1 here.
  double y2 = (kSqrt2 - 0.6) / 2.0;
  EXPECT_NEAR(eg::v3({0.3, y2 - 1e-12, 0.3}), 0.26523432269021225082, 1e-15);
  EXPECT_NEAR(eg::v3({0.3, y2 + 1e-12, 0.3}), 0.26523432269002513985, 1e-15);
}

TEST(V3, StaysInUnitIntervalAndDecays) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(0.0, 30.0);
  for (int k = 0; k < 2000; ++k) {
    double v = eg::v3({d(rng), d(rng), d(rng)});
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, kU0 + 1e-15);
  }
}

TEST(V2d, Values) {
  EXPECT_NEAR(eg::V2d(0, 0), kU0, 1e-15);
  EXPECT_NEAR(eg::V2d(0.7, 0), 0.17991814165103959824, 1e-14);
  EXPECT_NEAR(eg::V2d(0.3, 0.6), 0.25118071149967014806, 1e-14);
  EXPECT_NEAR(eg::V2d(0.5, 0), eg::V1_fn(0.5), 1e-15);
  EXPECT_NEAR(eg::V2d(0, 0.5), eg::V2_fn(0.5), 1e-15);
  EXPECT_NEAR(eg::V1_fn(0), kU0, 1e-15);
  EXPECT_NEAR(eg::V2_fn(0), kU0, 1e-15);
  EXPECT_NEAR(eg::V1_fn(3), 0.0067741722925592259323, 1e-14);
}

TEST(V2d, MatchesV3OnTheDiagonal) {
  EXPECT_NEAR(eg::v3({0.3, 0.7, 0.3}), eg::V2d(0.3, 0.7), 1e-12);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(0.0, 4.0);
  for (int k = 0; k < 100; ++k) {
    double a = d(rng), b = d(rng);
    EXPECT_NEAR(eg::v3({a, b, a}), eg::V2d(a, b), 1e-12) << a << "," << b;
  }
}

TEST(Traces, AgreeWithV3Restrictions) {
  const double x = 0.5, y = 0.8;
  EXPECT_NEAR(eg::f_fn(x, y), 0.19618121214712287514, 1e-14);
  EXPECT_NEAR(eg::r1_fn(x, y), 0.13783688105852666805, 1e-14);
  EXPECT_NEAR(eg::h_fn(x, y), 0.0075799251808283743849, 1e-14);
  EXPECT_NEAR(eg::r2_fn(x, y), 0.0040286983988121970235, 1e-14);
  EXPECT_NEAR(eg::f_fn(x, y), eg::v3({0, x / kSqrt2, y / kSqrt2}), 1e-13);
  EXPECT_NEAR(eg::r1_fn(x, y), eg::v3({x / kSqrt2, 0, (x + y) / kSqrt2}), 1e-13);
}

TEST(Traces, InitialConditions) {
  for (double x : {0.05, 0.3, 1.0, 2.5, 4.0}) {
    EXPECT_NEAR(eg::f_fn(x, 0), eg::f_initial(x), 1e-12);
    EXPECT_NEAR(eg::r1_fn(x, 0), eg::r1_initial(x), 1e-12);
    EXPECT_NEAR(eg::h_fn(x, 0), eg::h_initial(x), 1e-12);
    EXPECT_NEAR(eg::r2_fn(x, 0), eg::r2_initial(x), 1e-12);
  }
}

TEST(Gradient, OriginIsUniform) {
  auto g = eg::u4_grad({0, 0, 0, 0});
  for (double gi : g) EXPECT_NEAR(gi, 0.25, 1e-14);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    auto x = random_state(rng, -6, 6);
    auto g = eg::u4_grad(x);
    for (int i = 0; i < 4; ++i) {
      const double h = 1e-5;
      double fd = (eg::u4(x.shifted(i, h)) - eg::u4(x.shifted(i, -h))) / (2 * h);
      EXPECT_NEAR(g[i], fd, 1e-8);
    }
  }
}

TEST(Gradient, LiesOnTheSimplex) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    auto g = eg::u4_grad(random_state(rng, -3, 3));
    double s = 0.0;
    for (double gi : g) {
      EXPECT_GE(gi, -1e-12);
      EXPECT_LE(gi, 1 + 1e-12);
      s += gi;
    }
    EXPECT_NEAR(s, 1.0, 1e-10);
  }
}

TEST(ContinuumGrad, SmallerGames) {
  auto g3 = eg::continuum_grad({0, 0, 0});
  EXPECT_NEAR(g3[0] + g3[1] + g3[2], 1.0, 1e-12);
  EXPECT_EQ(g3[3], 0.0);
  auto g2 = eg::continuum_grad({0, 0});
  EXPECT_NEAR(g2[0], 0.5, 1e-15);
  EXPECT_NEAR(g2[1], 0.5, 1e-15);
}

TEST(Hessian, OriginMatchesClosedForm) {
  const double c = std::numbers::pi / (8.0 * kSqrt2);
  auto h = eg::u4_hess({0, 0, 0, 0});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_NEAR(h[i][j], c * (i == j ? 3.0 : -1.0), 1e-10);
}

TEST(Hessian, AnnihilatesOnes) {
  auto h = eg::u4_hess({0.1, 0.5, -0.2, 0.9});
  for (int i = 0; i < 4; ++i)
    EXPECT_NEAR(h[i][0] + h[i][1] + h[i][2] + h[i][3], 0.0, 1e-12);
}

TEST(Hessian, MatchesDifferencesOfGradient) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    auto x = random_state(rng, -6, 6);
    auto h = eg::u4_hess(x);
    for (int j = 0; j < 4; ++j) {
      const double step = 1e-5;
      auto gp = eg::u4_grad(x.shifted(j, step));
      auto gm = eg::u4_grad(x.shifted(j, -step));
      for (int i = 0; i < 4; ++i)
        EXPECT_NEAR(h[i][j], (gp[i] - gm[i]) / (2 * step), 1e-7);
    }
  }
}

TEST(Hessian, SymmetricAndComplementInvariant) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 500; ++k) {
    auto h = eg::u4_hess(random_state(rng, -2, 2));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) EXPECT_NEAR(h[i][j], h[j][i], 1e-10);
    for (std::uint32_t m = 0; m < 16; ++m) {
      eg::ExpertSubset j(m, 4);
      EXPECT_NEAR(eg::quadratic_form(h, j),
                  eg::quadratic_form(h, j.complement()), 1e-10);
    }
  }
}

TEST(Hessian, ContinuousAcrossTies) {
  const eg::RegretState base{0.1, 0.1, 0.5, 0.9};
  auto a = eg::u4_hess(base.shifted(0, 1e-7));
  auto b = eg::u4_hess(base.shifted(1, 1e-7));
  EXPECT_LT(max_abs(a, b), 1e-4);
  EXPECT_LT(max_abs(a, eg::u4_hess(base)), 1e-4);
}

TEST(Taylor, OriginModel) {
  EXPECT_NEAR(eg::taylor_u4_origin({0, 0, 0, 0}), kU0, 1e-15);
  EXPECT_NEAR(eg::taylor_u4_origin({0.3, 0.3, 0.3, 0.3}), kU0 + 0.3, 1e-14);
}

TEST(Taylor, RemainderIsCubic) {
  // |u - T| shrinks by about 8 when the point is halved.
  eg::RegretState x{0.02, -0.03, 0.05, 0.01};
  auto scaled = [&](double s) {
    return eg::RegretState{s * x[0], s * x[1], s * x[2], s * x[3]};
  };
  double r1 = std::abs(eg::u4(scaled(1)) - eg::taylor_u4_origin(scaled(1)));
  double r2 = std::abs(eg::u4(scaled(0.5)) - eg::taylor_u4_origin(scaled(0.5)));
  EXPECT_GT(r1 / r2, 6.0);
  EXPECT_LT(r1 / r2, 10.0);
}

TEST(Comb, ChoiceFollowsTieConvention) {
  EXPECT_EQ(eg::comb_set({1, 2, 3, 4}), eg::ExpertSubset::of({3, 1}, 4));
  EXPECT_EQ(eg::comb_set({0, 0, 0, 0}), eg::ExpertSubset::of({3, 1}, 4));
  EXPECT_EQ(eg::comb_set({5, 1, 5, 1}), eg::ExpertSubset::of({2, 3}, 4));
  EXPECT_EQ(eg::comb_set({1, 2, 3, 4}).to_string(), "{2,4}");
}

TEST(Comb, GapsAtReferencePoint) {
  auto g = eg::comb_gaps({0.1, 0.2, 0.3, 0.4});
  for (int m = 0; m < 16; ++m) EXPECT_NEAR(g[m], kGapsAtRamp[m], 1e-11) << m;
}

TEST(Comb, CombSetIsAHamiltonianMaximizer) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 1000; ++k) {
    auto x = random_state(rng, -2, 2);
    auto j = eg::comb_set(x);
    auto arg = eg::hamiltonian_argmax(x, 1e-8);
    EXPECT_NE(std::find(arg.begin(), arg.end(), j), arg.end());
    EXPECT_NE(std::find(arg.begin(), arg.end(), j.complement()), arg.end());
  }
}

TEST(Comb, ArgmaxAtOriginIsEveryPair) {
  auto arg = eg::hamiltonian_argmax({0, 0, 0, 0}, 1e-8);
  ASSERT_EQ(arg.size(), 6u);
  for (auto j : arg) EXPECT_EQ(j.size(), 2);
}

TEST(Properties, PermutationTranslationMonotonicity) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> lam(-5, 5);
  for (int k = 0; k < 300; ++k) {
    auto x = random_state(rng, -3, 3);
    const double u = eg::u4(x);
    std::array<int, 4> p{0, 1, 2, 3};
    do {
      EXPECT_NEAR(eg::u4({x[p[0]], x[p[1]], x[p[2]], x[p[3]]}), u, 1e-12);
    } while (std::next_permutation(p.begin(), p.end()));
    double l = lam(rng);
    EXPECT_NEAR(eg::u4(x.translated(l)), u + l, 1e-12);
    for (int i = 0; i < 4; ++i) EXPECT_GE(eg::u4(x.shifted(i, 0.01)), u - 1e-12);
  }
}
