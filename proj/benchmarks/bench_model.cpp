#include <benchmark/benchmark.h>

#include <random>

#include "hcmc/model.hpp"

namespace {

std::vector<hcmc::TrainingPair> batch_for(const hcmc::ModelConfig& c) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0.0, 1.0);
  auto vec = [&] {
    hcmc::FeatureVector v(c.input_dim());
    for (auto& x : v) x = d(rng);
    return v;
  };
  std::vector<hcmc::TrainingPair> batch;
  for (std::size_t i = 0; i < c.batch_size; ++i) {
    hcmc::TrainingPair p{hcmc::kAllLevels[i % 3], vec(), vec(), static_cast<int>(i % 2), {}, true};
    for (std::size_t k = 0; k < c.n_negatives; ++k) p.negatives.push_back(vec());
    batch.push_back(std::move(p));
  }
  return batch;
}

void BM_Backward(benchmark::State& state) {
  hcmc::ModelConfig c;
  c.hidden_dim = static_cast<std::size_t>(state.range(0));
  const auto params = hcmc::ModelParams::initialize(c);
  const auto batch = batch_for(c);
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::backward(batch, params, c.lambda));
}
BENCHMARK(BM_Backward)->Arg(64)->Arg(512);

void BM_AdamWStep(benchmark::State& state) {
  hcmc::ModelConfig c;
  auto params = hcmc::ModelParams::initialize(c);
  const std::vector<double> grad(params.size(), 1e-3);
  for (auto _ : state) hcmc::adamw_step(params, grad);
}
BENCHMARK(BM_AdamWStep);

void BM_PhiForward(benchmark::State& state) {
  hcmc::ModelConfig c;
  const auto params = hcmc::ModelParams::initialize(c);
  const auto batch = batch_for(c);
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::phi_forward(params, hcmc::Level::frame, batch[0].a, batch[0].b));
}
BENCHMARK(BM_PhiForward);

}  // namespace

BENCHMARK_MAIN();
