#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "expertgame/closed_form.hpp"
#include "expertgame/verify.hpp"

namespace eg = expertgame;

TEST(Hjb, ResidualAtInteriorAndTiedPoints) {
  EXPECT_LE(std::abs(eg::residual_hjb({0.1, 0.2, 0.3, 0.4})), 1e-8);
  EXPECT_LE(std::abs(eg::residual_hjb({0, 0, 0, 0})), 1e-7);
  EXPECT_LE(std::abs(eg::residual_hjb({0.1, 0.1, 0.5, 0.9})), 1e-7);
  EXPECT_LE(std::abs(eg::residual_hjb({-7, 0.3, 0.3, 9})), 1e-7);
}

TEST(VPde, InteriorResidual) {
  EXPECT_LE(std::abs(eg::residual_v_pde({0.4, 0.7, 0.9})), 1e-6);
  EXPECT_THROW(eg::residual_v_pde({0.4, 0.7, 0.0}), std::invalid_argument);
}

TEST(Reflection, FaceResiduals) {
  EXPECT_LE(std::abs(eg::residual_reflection({0.4, 0.7, 0.0}, 2)), 1e-6);
  EXPECT_LE(std::abs(eg::residual_reflection({0.4, 0.0, 0.9}, 1)), 1e-6);
  EXPECT_LE(std::abs(eg::residual_reflection({0.0, 0.7, 0.9}, 0)), 1e-6);
  EXPECT_THROW(eg::residual_reflection({0.4, 0.7, 0.9}, 2), std::invalid_argument);
}

TEST(Hyperbolic, ResidualsAtSamplePoint) {
  for (auto pair : {eg::HyperbolicPair::FR1, eg::HyperbolicPair::HR2}) {
    auto r = eg::residual_hyperbolic(0.5, 0.8, pair);
    EXPECT_LE(std::abs(r[0]), 1e-6);
    EXPECT_LE(std::abs(r[1]), 1e-6);
  }
}

TEST(CombGaps, NonnegativeWithCombAttaining) {
  eg::RegretState x{0.3, -0.4, 1.2, 0.5};
  auto g = eg::comb_gaps(x);
  for (double v : g) EXPECT_GE(v, -1e-9);
  auto j = eg::comb_set(x);
  EXPECT_LE(g[j.mask()], 1e-8);
  EXPECT_LE(g[j.complement().mask()], 1e-8);
}

TEST(Regularity, TiedPoints) {
  for (auto x : {eg::RegretState{0, 0, 0, 0}, eg::RegretState{0.2, 0.2, 1, 3},
                 eg::RegretState{1, 0.5, 1, 0.5}}) {
    EXPECT_TRUE(eg::check_regularity(x).pass);
    EXPECT_TRUE(eg::check_hessian_continuity(x).pass);
  }
}

TEST(Sampling, SobolAndLocusPoints) {
  auto s = eg::sobol_points(4, 256, -2, 2);
  ASSERT_EQ(s.size(), 256u);
  for (const auto& p : s)
    for (double v : p) {
      EXPECT_GE(v, -2.0);
      EXPECT_LE(v, 2.0);
    }
  auto l = eg::locus_points(10, -2, 2, 1);
  EXPECT_EQ(l.size(), 140u);
  int exact_ties = 0;
  for (const auto& p : l) {
    bool tie = false;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) tie |= p[i] == p[j];
    exact_ties += tie;
  }
  EXPECT_GE(exact_ties, 70);
}

TEST(Reports, JsonShape) {
  auto r = eg::ResidualReport::make("x", 3, 0.5, 1.0);
  EXPECT_TRUE(r.pass);
  nlohmann::json j = r;
  EXPECT_EQ(j.at("id"), "x");
  EXPECT_EQ(j.at("samples"), 3);
  EXPECT_FALSE(eg::ResidualReport::make("y", 1, 2.0, 1.0).pass);
  EXPECT_FALSE(eg::ResidualReport::make("z", 1, NAN, 1.0).pass);
}

TEST(Suites, FastSuitesPass) {
  eg::SuiteOptions o{.quick = true};
  for (const char* name : {"vpde", "reflections", "hyperbolic", "combgaps",
                           "regularity"}) {
    auto reports = eg::run_suite(name, o);
    ASSERT_FALSE(reports.empty()) << name;
    for (const auto& r : reports) EXPECT_TRUE(r.pass) << r.id << " " << r.max_residual;
  }
  EXPECT_THROW(eg::run_suite("nope"), std::invalid_argument);
}

TEST(Suites, SummaryListsEveryCheck) {
  auto reports = eg::run_suite("hyperbolic", {.quick = true});
  std::ostringstream os;
  eg::print_summary(os, reports);
  for (const auto& r : reports) EXPECT_NE(os.str().find(r.id), std::string::npos);
}

TEST(Convergence, SmallThreeExpertTable) {
  auto t = eg::convergence_table(3, {0.25, 0.09}, 4.0, 1e-8);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_TRUE(t.report.pass);
  EXPECT_LT(std::abs(t.rows[1].error), std::abs(t.rows[0].error));
}
