#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "synthbal/metrics.hpp"
#include "synthbal/scm.hpp"
#include "synthbal/simgen.hpp"

using namespace synthbal;

namespace {

std::vector<MatchRecord> bench_season(int teams) {
  LeagueScenario sc;
  sc.league_id = "B";
  sc.team_count = teams;
  sc.first_season = 1970;
  sc.last_season = 1970;
  sc.seed = 1;
  return generate_season(sc, 1970);
}

void BM_BuildSeasonTable(benchmark::State& state) {
  const auto matches = bench_season(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_season_table(matches, two_point_rule()));
  }
}
BENCHMARK(BM_BuildSeasonTable)->Arg(10)->Arg(20);

void BM_BalanceIndices(benchmark::State& state) {
  const auto table = build_season_table(bench_season(20), two_point_rule());
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_balance_indices(table, two_point_rule()));
  }
}
BENCHMARK(BM_BalanceIndices);

void BM_HhiBoundsExhaustive(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        hhi_bounds(k, two_point_rule(), BoundsMethod::exhaustive));
  }
}
BENCHMARK(BM_HhiBoundsExhaustive)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SolveInner(benchmark::State& state) {
  const int donors = static_cast<int>(state.range(0));
  const int rows = 12;
  std::mt19937_64 rng(7);
  auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<double> x1(rows), v(rows);
  std::vector<double> x0(static_cast<size_t>(rows) * donors);
  for (auto& x : x1) x = uniform();
  for (auto& x : x0) x = uniform();
  for (auto& x : v) x = uniform() + 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_inner(x1, x0, donors, v));
  }
}
BENCHMARK(BM_SolveInner)->Arg(3)->Arg(5)->Arg(8);

void BM_FitScm(benchmark::State& state) {
  CombinationScenario sc;
  for (int i = 0; i < 3; ++i) {
    LeagueScenario league;
    league.league_id = "D" + std::to_string(i + 1);
    league.team_count = 10;
    league.first_season = 1963;
    league.last_season = 1993;
    league.seed = 0;
    sc.donors.push_back(league);
  }
  sc.weights = {0.6, 0.4, 0.0};
  sc.seed = 3;
  const auto run = generate_combination_panel(sc);
  ScmConfig config;
  config.treated = "TREATED";
  config.treatment_year = 1981;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_scm(run.panel, config));
  }
}
BENCHMARK(BM_FitScm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
