#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "expertgame/closed_form.hpp"
#include "expertgame/game_solver.hpp"
#include "oracles.hpp"

namespace eg = expertgame;

TEST(DppInner, ZeroCosts) {
  std::vector<double> c(16, 0.0);
  auto s = eg::dpp_inner(eg::SubsetCosts(4, c));
  EXPECT_NEAR(s.value, 0.0, 1e-14);
  EXPECT_NEAR(eg::dpp_inner_dual(eg::SubsetCosts(4, c)).value, 0.0, 1e-14);
}

TEST(DppInner, TwoExpertExample) {
  std::vector<double> c{0, 1, 1, 1};
  auto s = eg::dpp_inner(eg::SubsetCosts(2, c));
  EXPECT_NEAR(s.value, 0.5, 1e-14);
  EXPECT_NEAR(s.alpha.alpha[0], 0.5, 1e-14);
  EXPECT_NEAR(s.alpha.alpha[1], 0.5, 1e-14);
  EXPECT_NEAR(eg::dpp_inner_dual(eg::SubsetCosts(2, c)).value, 0.5, 1e-14);
}

TEST(DppInner, AlphaIsOnTheSimplexAndAttainsTheValue) {
  std::mt19937_64 rng(21);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 0; k < 200; ++k) {
      auto c = oracle::random_costs(rng, n);
      auto s = eg::dpp_inner(eg::SubsetCosts(n, c));
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        EXPECT_GE(s.alpha.alpha[i], 0.0);
        sum += s.alpha.alpha[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_NEAR(oracle::inner_objective(c, n, s.alpha.alpha.data()), s.value,
                  1e-12);
    }
  }
}

TEST(DppInner, StrongDuality) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + k % 3;
    eg::SubsetCosts c(n, oracle::random_costs(rng, n));
    EXPECT_NEAR(eg::dpp_inner(c).value, eg::dpp_inner_dual(c).value, 1e-9);
  }
}

TEST(DppInner, MatchesGridSearch) {
  std::mt19937_64 rng(29);
  for (int n = 2; n <= 3; ++n) {
    for (int k = 0; k < 20; ++k) {
      auto c = oracle::random_costs(rng, n);
      double lp = eg::dpp_inner(eg::SubsetCosts(n, c)).value;
      double grid = oracle::grid_min(c, n, 2e-3);
      EXPECT_LE(lp, grid + 1e-12);
      EXPECT_NEAR(lp, grid, 3e-3);
    }
  }
}

TEST(DppInner, ShiftAndMonotonicity) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 100; ++k) {
    auto c = oracle::random_costs(rng, 3);
    double v = eg::dpp_inner(eg::SubsetCosts(3, c)).value;
    auto shifted = c;
    for (double& x : shifted) x += 0.7;
    EXPECT_NEAR(eg::dpp_inner(eg::SubsetCosts(3, shifted)).value, v + 0.7, 1e-12);
    auto bigger = c;
    bigger[k % 8] += 0.3;
    EXPECT_GE(eg::dpp_inner(eg::SubsetCosts(3, bigger)).value, v - 1e-12);
  }
}

TEST(DppInner, ReusedSolverAgrees) {
  std::mt19937_64 rng(37);
  eg::InnerSolver solver(4);
  for (int k = 0; k < 100; ++k) {
    eg::SubsetCosts c(4, oracle::random_costs(rng, 4));
    EXPECT_EQ(solver.value(c), eg::dpp_inner(c).value);
  }
}

TEST(SubsetCosts, RejectsBadInput) {
  EXPECT_THROW(eg::SubsetCosts(5), std::invalid_argument);
  std::vector<double> three(3, 0.0);
  EXPECT_THROW(eg::SubsetCosts(2, three), std::invalid_argument);
  eg::SubsetCosts c(2);
  EXPECT_THROW(c.set(0, NAN), std::invalid_argument);
  EXPECT_THROW(c.set(4, 0.0), std::invalid_argument);
}

TEST(ValueIteration, DeltaOneIsPhi) {
  for (int n = 2; n <= 4; ++n) {
    auto g = eg::solve_vdelta(n, eg::StoppingParam(1.0), 6);
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      auto p = g.point(k);
      double top = 0.0;
      for (int gi : p) top += gi;
      EXPECT_EQ(g.values[k], top);
    }
  }
}

TEST(ValueIteration, ContractsAndSolvesTheRecursion) {
  auto g = eg::solve_vdelta(3, eg::StoppingParam(0.16), 12, {.tol = 1e-10});
  ASSERT_GE(g.change_history.size(), 2u);
  for (std::size_t k = 1; k < g.change_history.size(); ++k)
    EXPECT_LE(g.change_history[k], (1 - 0.16) * g.change_history[k - 1] + 1e-12);
  auto next = eg::bellman_update(g);
  double res = 0.0;
  for (std::size_t k = 0; k < next.size(); ++k)
    res = std::max(res, std::abs(next[k] - g.values[k]));
  EXPECT_LE(res, 2e-10);
}

TEST(ValueIteration, ThreadCountDoesNotChangeValues) {
  auto a = eg::solve_vdelta(4, eg::StoppingParam(0.25), 8, {.threads = 1});
  auto b = eg::solve_vdelta(4, eg::StoppingParam(0.25), 8, {.threads = 3});
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(ValueIteration, ValuesAreMonotoneInTheTopGap) {
  auto g = eg::solve_vdelta(2, eg::StoppingParam(0.1), 30);
  for (int k = 1; k <= g.radius; ++k) {
    int a[1] = {k - 1}, b[1] = {k};
    EXPECT_GE(g.at(b), g.at(a) - 1e-9);
  }
}

TEST(ValueIteration, TwoExpertOriginNearLimit) {
  const double delta = 0.04;
  auto g = eg::solve_vdelta(2, eg::StoppingParam(delta), eg::default_radius(delta));
  double v = eg::rescaled_value(g, {0, 0});
  EXPECT_NEAR(v, 1.0 / (2.0 * std::numbers::sqrt2), 0.02);
  EXPECT_EQ(v, std::sqrt(delta) * g.values[0]);
}

TEST(ValueIteration, LatticeValueUsesTranslation) {
  auto g = eg::solve_vdelta(3, eg::StoppingParam(0.2), 10);
  long long xi[3] = {5, 7, 6};
  int gap[2] = {1, 1};
  EXPECT_EQ(g.lattice_value(xi), g.at(gap) + 5.0);
  long long far[3] = {0, 0, 11};
  EXPECT_THROW(g.lattice_value(far), std::out_of_range);
}

TEST(ValueIteration, IterationCapRaises) {
  EXPECT_THROW(eg::solve_vdelta(3, eg::StoppingParam(0.01), 10,
                                {.tol = 1e-12, .max_iterations = 3}),
               eg::NumericalError);
}

TEST(ValueIteration, RejectsBadArguments) {
  EXPECT_THROW(eg::StoppingParam(0.0), std::invalid_argument);
  EXPECT_THROW(eg::StoppingParam(1.5), std::invalid_argument);
  EXPECT_THROW(eg::solve_vdelta(5, eg::StoppingParam(0.5), 10), std::invalid_argument);
  EXPECT_THROW(eg::solve_vdelta(3, eg::StoppingParam(0.5), 2), std::invalid_argument);
}

TEST(Underline, BoundedByMinimaxValue) {
  const eg::StoppingParam d(0.16);
  auto under = eg::solve_underline_u(d, 20);
  auto minimax = eg::solve_vdelta(4, d, 20);
  EXPECT_LE(under.values[0], minimax.values[0] + 1e-6);
  EXPECT_NEAR(under.values[0], minimax.values[0], 0.05 / std::sqrt(0.16));
}

TEST(ValueGridJson, RoundTripIsExact) {
  auto g = eg::solve_vdelta(3, eg::StoppingParam(0.3), 7);
  nlohmann::json j = g;
  auto back = nlohmann::json::parse(j.dump()).get<eg::ValueGrid>();
  EXPECT_EQ(back.values, g.values);
  EXPECT_EQ(back.n, 3);
  EXPECT_EQ(back.radius, 7);
  EXPECT_EQ(back.delta, g.delta);
  EXPECT_EQ(back.boundary_rule, "continuum_far_field");
  j["format_version"] = 99;
  EXPECT_THROW(j.get<eg::ValueGrid>(), std::invalid_argument);
}

TEST(FarField, IsPhiPlusScaledGapValue) {
  std::vector<double> g{0, 0, 0};
  EXPECT_NEAR(eg::far_field_value(4, 0.04, g),
              eg::v3({0, 0, 0}) / 0.2, 1e-12);
}
