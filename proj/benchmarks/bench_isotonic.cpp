#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mtrend/estimators.hpp"
#include "mtrend/isotonic.hpp"

namespace {

std::vector<double> noisy_trend(std::size_t n) {
  std::mt19937_64 eng(7);
  std::normal_distribution<double> z(0.0, 0.25);
  std::vector<double> y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = static_cast<double>(k + 1) / static_cast<double>(n) + z(eng);
  return y;
}

void BM_Gcm(benchmark::State& state) {
  const auto y = noisy_trend(static_cast<std::size_t>(state.range(0)));
  const auto d = mtrend::cusum_diagram(y);
  for (auto _ : state) benchmark::DoNotOptimize(mtrend::gcm(d));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gcm)->RangeMultiplier(8)->Range(64, 1 << 18)->Complexity(benchmark::oN);

void BM_Pava(benchmark::State& state) {
  const auto y = noisy_trend(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mtrend::pava(y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pava)->RangeMultiplier(8)->Range(64, 1 << 18)->Complexity(benchmark::oN);

void BM_PenalizedLast(benchmark::State& state) {
  const auto y = noisy_trend(static_cast<std::size_t>(state.range(0)));
  const mtrend::PenaltySpec p;
  for (auto _ : state) benchmark::DoNotOptimize(mtrend::penalized_last(y, p));
}
BENCHMARK(BM_PenalizedLast)->Arg(150)->Arg(1500)->Arg(15000);

}  // namespace
