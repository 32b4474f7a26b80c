#include <benchmark/benchmark.h>

#include <random>

#include "hcmc/reorder.hpp"

namespace {

hcmc::ScoreMatrix random_matrix(std::size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_real_distribution<double> w(-0.99, 0.99);
  hcmc::ScoreMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) m.set(i, j, w(rng));
    }
  }
  return m;
}

void BM_BeamSearch(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)));
  const auto bsize = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::beam_search(m, bsize));
}
BENCHMARK(BM_BeamSearch)->ArgsProduct({{4, 8, 20}, {1, 8, 64}});

void BM_ExactMaxPath(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::exact_max_path(m));
}
BENCHMARK(BM_ExactMaxPath)->Arg(6)->Arg(8);

}  // namespace
