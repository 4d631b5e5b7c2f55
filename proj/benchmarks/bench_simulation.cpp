#include <benchmark/benchmark.h>

#include "mtrend/limits.hpp"
#include "mtrend/rng.hpp"
#include "mtrend/stochastic.hpp"

namespace {

void BM_Ar1Path(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mtrend::ar1_path(n, {0.5, 0.25, seed++, 0}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Ar1Path)->Arg(150)->Arg(100000);

// One Chernoff replication per item on the default 1e-3 grid.
void BM_ChernoffReplication(benchmark::State& state) {
  const mtrend::BmGrid grid = mtrend::default_chernoff_grid();
  mtrend::SamplerOptions opts;
  opts.threads = 1;
  opts.auto_widen = false;
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mtrend::chernoff_sample(64, grid, seed++, opts));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ChernoffReplication)->Unit(benchmark::kMillisecond);

void BM_TwoSidedBm(benchmark::State& state) {
  const mtrend::BmGrid grid = mtrend::default_chernoff_grid();
  std::vector<double> path(grid.size());
  auto stream = mtrend::Stream::derive(1, 0);
  for (auto _ : state) {
    mtrend::two_sided_bm(grid, stream, path);
    benchmark::DoNotOptimize(path.data());
  }
}
BENCHMARK(BM_TwoSidedBm);

}  // namespace
