#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "expertgame/closed_form.hpp"
#include "expertgame/game_solver.hpp"
#include "expertgame/rbm_sim.hpp"

namespace eg = expertgame;

namespace {

std::vector<eg::RegretState> states(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  std::vector<eg::RegretState> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back({d(rng), d(rng), d(rng), d(rng)});
  return out;
}

void BM_u4(benchmark::State& st) {
  const auto xs = states(1024);
  std::size_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(eg::u4(xs[k++ & 1023]));
}
BENCHMARK(BM_u4);

void BM_u4_hess(benchmark::State& st) {
  const auto xs = states(1024);
  std::size_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(eg::u4_hess(xs[k++ & 1023]));
}
BENCHMARK(BM_u4_hess);

void BM_dpp_inner(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<eg::SubsetCosts> cs;
  for (int k = 0; k < 256; ++k) {
    std::vector<double> c(1u << n);
    for (double& v : c) v = d(rng);
    cs.emplace_back(n, c);
  }
  eg::InnerSolver solver(n);
  std::size_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(solver.value(cs[k++ & 255]));
}
BENCHMARK(BM_dpp_inner)->Arg(2)->Arg(3)->Arg(4);

void BM_skorokhod_push(benchmark::State& st) {
  const auto spec = eg::ReflectionSpec::default3();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  std::vector<eg::Vec3> ys(1024);
  for (auto& y : ys) y = {d(rng), d(rng), d(rng)};
  std::size_t k = 0;
  for (auto _ : st) benchmark::DoNotOptimize(eg::skorokhod_push(ys[k++ & 1023], spec));
}
BENCHMARK(BM_skorokhod_push);

void BM_bellman_sweep(benchmark::State& st) {
  const int radius = static_cast<int>(st.range(0));
  auto grid = eg::solve_vdelta(4, eg::StoppingParam(0.16), radius);
  for (auto _ : st) benchmark::DoNotOptimize(eg::bellman_update(grid));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(grid.values.size()));
}
BENCHMARK(BM_bellman_sweep)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
