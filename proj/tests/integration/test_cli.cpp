#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using expertgame::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "expertgame");
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "expertgame_cli_test";
  fs::create_directories(d);
  return d / name;
}

}  // namespace

TEST(CliEval, Values) {
  EXPECT_EQ(call({"eval", "u4", "0", "0", "0", "0"}).out, "0.55536036726979576\n");
  EXPECT_EQ(call({"eval", "comb", "1", "2", "3", "4"}).out, "{4,2}\n");
  EXPECT_EQ(call({"eval", "phi", "1", "2", "3", "4"}).out, "4\n");
  auto j = nlohmann::json::parse(call({"--json", "eval", "grad", "0", "0", "0", "0"}).out);
  EXPECT_EQ(j.at("value").size(), 4u);
}

TEST(CliEval, UsageErrors) {
  EXPECT_EQ(call({"eval", "u4", "0", "0", "0"}).code, 2);
  EXPECT_EQ(call({"eval", "v3", "-1", "0", "0"}).code, 2);
  EXPECT_EQ(call({"eval", "u4", "0", "nan", "0", "0"}).code, 2);
  auto r = call({"eval", "bogus", "0"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("valid:"), std::string::npos);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
}

TEST(CliSolve, DeltaOneGridIsPhi) {
  auto path = scratch("phi.json");
  auto r = call({"solve", "--n", "4", "--delta", "1", "--radius", "5", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(slurp(path));
  auto values = j.at("values").get<std::vector<double>>();
  ASSERT_EQ(values.size(), 216u);
  // Row-major over (g1, g2, g3); Phi = g1 + g2 + g3.
  for (int k = 0; k < 216; ++k) EXPECT_EQ(values[k], k / 36 + (k / 6) % 6 + k % 6);
  EXPECT_TRUE(fs::exists(path.string() + ".manifest.json"));
}

TEST(CliSolve, SameFlagsGiveIdenticalFiles) {
  auto a = scratch("a.json"), b = scratch("b.json");
  std::vector<std::string> args{"solve", "--n", "3", "--delta", "0.2", "--radius", "8", "--out"};
  auto ra = args, rb = args;
  ra.push_back(a.string());
  rb.push_back(b.string());
  ASSERT_EQ(call(ra).code, 0);
  ASSERT_EQ(call(rb).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(CliSolve, ConfigFileSuppliesDefaultsAndFlagsWin) {
  auto cfg = scratch("cfg.json");
  std::ofstream(cfg) << R"({"n": 3, "delta": 0.5, "radius": 6})";
  auto j = nlohmann::json::parse(
      call({"--json", "--config", cfg.string(), "solve", "--delta", "0.25"}).out);
  EXPECT_EQ(j.at("n"), 3);
  EXPECT_EQ(j.at("radius"), 6);
  EXPECT_EQ(j.at("delta"), 0.25);
  std::ofstream(cfg) << "not json";
  EXPECT_EQ(call({"--config", cfg.string(), "solve"}).code, 2);
}

TEST(CliSolve, BadArguments) {
  EXPECT_EQ(call({"solve", "--delta", "0"}).code, 2);
  EXPECT_EQ(call({"solve", "--n", "5"}).code, 2);
  EXPECT_EQ(call({"solve", "--game", "balanced_comb", "--n", "3"}).code, 2);
}

TEST(CliSimulate, DeltaOneRegretIsPhi) {
  auto j = nlohmann::json::parse(call({"--json", "simulate", "game", "--delta", "1",
                                       "--x0", "0.5", "2", "-1", "0", "--episodes", "20"})
                                     .out);
  EXPECT_EQ(j.at("mean"), 2.0);
  EXPECT_EQ(j.at("stderr"), 0.0);
}

TEST(CliSimulate, SameSeedSameCsv) {
  std::vector<std::string> args{"simulate", "game", "--delta", "0.2", "--episodes", "300",
                                "--seed", "11", "--player", "uniform"};
  EXPECT_EQ(call(args).out, call(args).out);
  std::vector<std::string> rbm{"simulate", "rbm", "--y0", "0.5", "0.5", "0.5", "--dt", "0.01",
                               "--horizon", "3", "--paths", "50", "--seed", "4"};
  auto a = call(rbm);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, call(rbm).out);
  EXPECT_EQ(a.out.rfind("y0,dt,horizon,n,mean,stderr,seed", 0), 0u);
}

TEST(CliSimulate, PolicyErrors) {
  EXPECT_EQ(call({"simulate", "game", "--nature", "sideways"}).code, 2);
  EXPECT_EQ(call({"simulate", "game", "--player", "mw", "--eta", "0"}).code, 2);
  EXPECT_EQ(call({"simulate", "game", "--n", "3", "--nature", "balanced_comb"}).code, 2);
  EXPECT_EQ(call({"simulate", "rbm", "--y0", "-1", "0", "0"}).code, 2);
}

TEST(CliVerify, SuitesAndExitCodes) {
  auto path = scratch("combgaps.json");
  auto r = call({"verify", "combgaps", "--quick", "--out", path.string()});
  EXPECT_EQ(r.code, 0) << r.out;
  auto j = nlohmann::json::parse(slurp(path));
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_EQ(call({"verify", "hyperbolic", "--quick"}).code, 0);
  EXPECT_EQ(call({"verify", "nonsense"}).code, 2);
}
