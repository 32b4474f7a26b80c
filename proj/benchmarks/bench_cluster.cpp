#include <benchmark/benchmark.h>

#include "hcmc/cluster.hpp"
#include "hcmc/datagen.hpp"

namespace {

void BM_KMeans(benchmark::State& state) {
  hcmc::GenConfig g;
  g.n_scenes = 2;
  g.shots_per_scene = static_cast<std::size_t>(state.range(0));
  g.frames_per_shot = 4;
  g.seed = 1;
  const auto clip = hcmc::generate_clip(g).clip;
  std::vector<hcmc::FeatureVector> points;
  for (const auto& f : clip.frames) points.push_back(f.vision_feat);
  hcmc::ClusterConfig cfg;
  cfg.m = 2 * g.shots_per_scene;
  cfg.distance = state.range(1) == 0 ? hcmc::DistanceKind::euclidean : hcmc::DistanceKind::cosine;
  for (auto _ : state) benchmark::DoNotOptimize(hcmc::kmeans(points, cfg));
}
BENCHMARK(BM_KMeans)->ArgsProduct({{2, 5, 10}, {0, 1}});

}  // namespace
