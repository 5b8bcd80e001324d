// Microbenchmarks for the hot paths: value-iteration sweeps, table lookups,
// the online calibration update, and a full simulated episode.

#include <benchmark/benchmark.h>

#include <vector>

#include "acofi/harness.hpp"

using namespace acofi;

namespace {

ExperimentConfig bench_cfg(int nx, int ny, int ntheta) {
  ExperimentConfig cfg;
  cfg.grid.nx = nx;
  cfg.grid.ny = ny;
  cfg.grid.ntheta = ntheta;
  return cfg;
}

const QTable& solved_table(const ExperimentConfig& cfg) {
  static QTable qt = solve_safety_bellman(cfg.world, cfg.grid, cfg.dyn,
                                          cfg.gamma, cfg.solver_tol,
                                          cfg.solver_max_iters);
  return qt;
}

void BM_BackupSweep(benchmark::State& state) {
  ExperimentConfig cfg = bench_cfg(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(1)));
  QTable qt;
  qt.grid = cfg.grid;
  qt.dyn = cfg.dyn;
  qt.gamma = cfg.gamma;
  qt.values.assign(cfg.grid.node_count() * 3, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(backup_sweep(qt, cfg.world));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(qt.values.size()));
}
BENCHMARK(BM_BackupSweep)->Args({21, 16})->Args({61, 48});

void BM_QValue(benchmark::State& state) {
  ExperimentConfig cfg = bench_cfg(61, 61, 48);
  const QTable& qt = solved_table(cfg);
  DrawStream rng(7);
  std::vector<DubinsState> states;
  for (std::uint64_t n = 0; n < 1024; ++n)
    states.push_back({rng.uniform01(n, 0), rng.uniform01(n, 1),
                      rng.uniform01(n, 2) * kTwoPi});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        q_value(qt, states[i++ & 1023], Action::Straight));
  }
}
BENCHMARK(BM_QValue);

void BM_VValue(benchmark::State& state) {
  ExperimentConfig cfg = bench_cfg(61, 61, 48);
  const QTable& qt = solved_table(cfg);
  DrawStream rng(8);
  std::vector<DubinsState> states;
  for (std::uint64_t n = 0; n < 1024; ++n)
    states.push_back({rng.uniform01(n, 0), rng.uniform01(n, 1),
                      rng.uniform01(n, 2) * kTwoPi});
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(v_value(qt, states[i++ & 1023]));
  }
}
BENCHMARK(BM_VValue);

void BM_AciUpdate(benchmark::State& state) {
  DrawStream rng(9);
  AciState aci(0.2, 0.05, 0.2);
  std::uint64_t n = 0;
  for (auto _ : state) {
    // Keep the score multiset from growing without bound across iterations.
    if (aci.scores.size() > 4096) aci = AciState(0.2, 0.05, 0.2);
    benchmark::DoNotOptimize(
        record_and_update(aci, rng.uniform01(n, 0), rng.uniform01(n, 1)));
    ++n;
  }
}
BENCHMARK(BM_AciUpdate);

void BM_Quantile(benchmark::State& state) {
  DrawStream rng(10);
  std::vector<double> scores;
  for (std::uint64_t n = 0; n < static_cast<std::uint64_t>(state.range(0));
       ++n)
    scores.push_back(rng.uniform01(n, 0));
  std::sort(scores.begin(), scores.end());
  std::uint64_t n = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantile(scores, rng.uniform01(++n, 1)));
  }
}
BENCHMARK(BM_Quantile)->Arg(64)->Arg(4096);

void BM_Episode(benchmark::State& state) {
  ExperimentConfig cfg = bench_cfg(61, 61, 48);
  const QTable& qt = solved_table(cfg);
  std::uint64_t seed = cfg.base_seed;
  for (auto _ : state) {
    EpisodeResult r = run_episode(PolicyKind::Acofi,
                                  ScenarioKind::VarSpeedAndSteer, cfg, qt,
                                  seed++);
    benchmark::DoNotOptimize(r.metrics.total_steps);
  }
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
