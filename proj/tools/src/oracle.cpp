#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cli.hpp"
#include "hcmc/datagen.hpp"
#include "hcmc/inference.hpp"
#include "hcmc/metrics.hpp"
#include "hcmc/reorder.hpp"
#include "hcmc/rng.hpp"

namespace hcmc::cli {

namespace {

Permutation random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  std::shuffle(m.begin(), m.end(), rng);
  return Permutation(std::move(m));
}

std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

void check_ordering(std::uint64_t s, Rng& rng, OracleReport& report) {
  const auto n = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
  const auto gt = random_permutation(n, rng);
  const auto pred = random_permutation(n, rng);
  for (int beta = 2; beta <= std::min<int>(4, static_cast<int>(n)); ++beta) {
    ++report.checks;
    if (ordering_score(gt, pred, beta) != ordering_score_bruteforce(gt, pred, beta)) {
      report.failures.push_back("seed " + std::to_string(s) + ": ordering_score n=" + std::to_string(n) +
                                " beta=" + std::to_string(beta) + " disagrees with enumeration");
    }
  }
}

void check_beam(std::uint64_t s, Rng& rng, OracleReport& report) {
  const auto n = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
  std::uniform_real_distribution<double> w(-0.99, 0.99);
  ScoreMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) m.set(i, j, w(rng));
    }
  }
  ++report.checks;
  const auto beam = beam_search(m, std::max<std::size_t>(1, factorial(n - 1)));
  const auto exact = exact_max_path(m);
  if (std::abs(beam.weight - exact.weight) > 1e-12) {
    report.failures.push_back("seed " + std::to_string(s) + ": beam_search n=" + std::to_string(n) +
                              " weight " + std::to_string(beam.weight) + " != exact " +
                              std::to_string(exact.weight));
  }
}

void check_confidence(std::uint64_t s, Rng& rng, OracleReport& report) {
  std::normal_distribution<double> logit(0.0, 5.0);
  ++report.checks;
  const Logits l{logit(rng), logit(rng)};
  const double c = order_confidence(l);
  if (std::abs(c - std::tanh((l[1] - l[0]) / 2.0)) > 1e-12 || !(c > -1.0 && c < 1.0)) {
    report.failures.push_back("seed " + std::to_string(s) + ": order_confidence mismatch");
  }
}

void check_pipeline(std::uint64_t s, Rng& rng, OracleReport& report) {
  GenConfig g;
  g.n_scenes = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
  g.shots_per_scene = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
  g.frames_per_shot = std::uniform_int_distribution<std::size_t>(1, 5)(rng);
  g.seed = derive_seed(s, "oracle.clip");
  const auto gen = generate_clip(g, "oracle_" + std::to_string(s));
  const auto clip = shuffle_clip(gen.clip, derive_seed(s, "oracle.shuffle"));
  const Hierarchy h = hierarchy_from_labels(clip);
  const OracleScorer scorer(clip);
  for (auto mode : {LevelMode::frame_shot_scene, LevelMode::frame_shot, LevelMode::frame_scene}) {
    InferenceConfig cfg;
    cfg.level_mode = mode;
    ++report.checks;
    const auto res = infer_order(clip, scorer, cfg, &h);
    if (res.order != ground_truth_permutation(clip)) {
      report.failures.push_back("seed " + std::to_string(s) + ": oracle pipeline (" +
                                std::string(level_mode_name(mode)) + ", " + std::to_string(g.n_scenes) + "x" +
                                std::to_string(g.shots_per_scene) + "x" + std::to_string(g.frames_per_shot) +
                                ") did not recover the ground truth");
    }
  }
}

}  // namespace

OracleReport run_oracle_checks(std::uint64_t seed, std::size_t n_seeds) {
  OracleReport report;
  for (std::uint64_t s = 0; s < n_seeds; ++s) {
    Rng rng(derive_seed(seed, "oracle", s));
    check_ordering(s, rng, report);
    check_beam(s, rng, report);
    check_confidence(s, rng, report);
    check_pipeline(s, rng, report);
  }
  return report;
}

}  // namespace hcmc::cli
