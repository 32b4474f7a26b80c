#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "hcmc/metrics.hpp"

namespace {

hcmc::Permutation shuffled(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(m.begin(), m.end(), rng);
  return hcmc::Permutation(m);
}

void BM_OrderingScore(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int beta = static_cast<int>(state.range(1));
  const auto gt = shuffled(n, 1), pred = shuffled(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::ordering_score(gt, pred, beta));
}
BENCHMARK(BM_OrderingScore)->ArgsProduct({{10, 20, 100, 1000}, {2, 3, 4}});

void BM_OrderingScoreBruteforce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto gt = shuffled(n, 1), pred = shuffled(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::ordering_score_bruteforce(gt, pred, 3));
}
BENCHMARK(BM_OrderingScoreBruteforce)->Arg(8)->Arg(12);

void BM_Assignment(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<double>> w(n, std::vector<double>(n));
  for (auto& row : w) {
    for (auto& x : row) x = u(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::max_weight_assignment(w));
}
BENCHMARK(BM_Assignment)->Arg(4)->Arg(16)->Arg(64);

}  // namespace
