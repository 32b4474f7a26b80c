#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "hcmc/datagen.hpp"
#include "hcmc/evaluation.hpp"
#include "hcmc/inference.hpp"
#include "hcmc/reorder.hpp"
#include "test_util.hpp"

using namespace hcmc;
using hcmc::testing::layered_clip;

namespace {

InferenceConfig mode(LevelMode m) {
  InferenceConfig cfg;
  cfg.level_mode = m;
  return cfg;
}

ModelParams small_model(std::size_t d_v, std::size_t d_u) {
  ModelConfig c;
  c.d_v = d_v;
  c.d_u = d_u;
  c.hidden_dim = 8;
  c.proj_dim = 4;
  c.seed = 3;
  return ModelParams::initialize(c);
}

// Deterministic pseudo-random logits, unrelated to the ground truth.
class NoiseScorer final : public OrderScorer {
 public:
  Logits logits(Level level, const Group& a, const Group& b) const override {
    const auto h = a.positions.front() * 7919 + b.positions.front() * 104729 + static_cast<std::size_t>(level);
    return {static_cast<double>(h % 13), static_cast<double>(h % 7)};
  }
  FeatureVector embed(Level, const FeatureVector& rep) const override { return rep; }
};

GeneratedClip generated(std::uint64_t seed, std::size_t scenes = 2, std::size_t shots = 3, std::size_t frames = 3) {
  GenConfig g;
  g.n_scenes = scenes;
  g.shots_per_scene = shots;
  g.frames_per_shot = frames;
  g.seed = seed;
  return generate_clip(g, "gen" + std::to_string(seed));
}

}  // namespace

TEST(LevelMode, NamesAndFlags) {
  for (auto m : {LevelMode::frame_only, LevelMode::frame_shot, LevelMode::frame_scene, LevelMode::frame_shot_scene}) {
    EXPECT_EQ(parse_level_mode(level_mode_name(m)), m);
  }
  EXPECT_THROW(parse_level_mode("scene_only"), std::invalid_argument);
  EXPECT_FALSE(uses_scenes(LevelMode::frame_shot));
  EXPECT_TRUE(uses_shots(LevelMode::frame_shot));
  EXPECT_TRUE(uses_scenes(LevelMode::frame_scene));
  EXPECT_FALSE(uses_shots(LevelMode::frame_scene));
}

TEST(InferenceConfig, Validate) {
  auto cfg = mode(LevelMode::frame_shot);
  cfg.bsize = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Inference, FrameOnlyIsPlainBeamSearch) {
  const auto params = small_model(3, 2);
  const auto clip = shuffle_clip(layered_clip({{3, 2}, {4}}), 5);
  std::vector<FeatureVector> reps;
  for (const auto& f : clip.frames) reps.push_back(encode_frame(f.vision_feat, f.text_feat));
  for (std::size_t b : {1u, 4u, 8u}) {
    auto cfg = mode(LevelMode::frame_only);
    cfg.bsize = b;
    const auto res = infer_order(clip, params, cfg);
    EXPECT_EQ(res.order, beam_search(score_matrix(reps, params, Level::frame), b).order);
    EXPECT_TRUE(res.trace.scene_embeddings.empty());
  }
}

TEST(Inference, OracleScorerRecoversGroundTruthWithGivenHierarchy) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto clip = shuffle_clip(generated(seed, 1 + seed % 3, 1 + seed % 4, 1 + seed % 5).clip, seed);
    const auto h = hierarchy_from_labels(clip);
    const OracleScorer scorer(clip);
    for (auto m : {LevelMode::frame_shot_scene, LevelMode::frame_shot, LevelMode::frame_scene}) {
      EXPECT_EQ(infer_order(clip, scorer, mode(m), &h).order, ground_truth_permutation(clip))
          << level_mode_name(m) << " seed " << seed;
    }
  }
}

TEST(Inference, ClusteringRecoversCleanHierarchy) {
  GenConfig g;
  g.noise = 0.0;
  g.drift = 0.0;
  g.pair_rate = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    g.seed = seed;
    const auto clip = shuffle_clip(generate_clip(g).clip, seed);
    const OracleScorer scorer(clip);
    const auto res = infer_order(clip, scorer, mode(LevelMode::frame_shot_scene));
    const auto h = hierarchy_from_labels(clip);
    auto truth = h.scene_partition();
    auto got = res.trace.scene_partition;
    for (auto& p : truth) std::sort(p.begin(), p.end());
    std::sort(truth.begin(), truth.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, truth) << "seed " << seed;
    EXPECT_EQ(res.order, ground_truth_permutation(clip)) << "seed " << seed;
  }
}

TEST(Inference, TrivialHierarchyMatchesFrameOnly) {
  const auto clip = shuffle_clip(layered_clip({{6}}), 2);
  const OracleScorer scorer(clip);
  const auto flat = infer_order(clip, scorer, mode(LevelMode::frame_only));
  for (auto m : {LevelMode::frame_shot, LevelMode::frame_scene, LevelMode::frame_shot_scene}) {
    EXPECT_EQ(infer_order(clip, scorer, mode(m)).order, flat.order);
  }
  EXPECT_EQ(flat.order, ground_truth_permutation(clip));
}

TEST(Inference, AlwaysReturnsBijectionFlattenedFromTrace) {
  const NoiseScorer scorer;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto clip = shuffle_clip(generated(seed).clip, seed + 50);
    for (auto m : {LevelMode::frame_only, LevelMode::frame_shot, LevelMode::frame_scene, LevelMode::frame_shot_scene}) {
      const auto res = infer_order(clip, scorer, mode(m));
      ASSERT_EQ(res.order.size(), clip.n_frames());
      ASSERT_TRUE(Permutation::is_bijection(res.order.mapping()));

      // Scenes in scene_order, shots in shot_orders, frames in frame_orders.
      const auto& t = res.trace;
      std::vector<std::size_t> offsets{0};
      for (const auto& shots : t.shot_partitions) offsets.push_back(offsets.back() + shots.size());
      std::vector<std::size_t> rebuilt;
      for (std::size_t s : t.scene_order) {
        for (std::size_t k : t.shot_orders[s]) {
          const auto& frames = t.frame_orders[offsets[s] + k];
          rebuilt.insert(rebuilt.end(), frames.begin(), frames.end());
        }
      }
      EXPECT_EQ(rebuilt, res.order.mapping());
      // Every shot stays contiguous inside the final order.
      for (const auto& frames : t.frame_orders) {
        const auto inv = res.order.inverse();
        std::vector<std::size_t> ranks;
        for (std::size_t p : frames) ranks.push_back(inv[p]);
        std::sort(ranks.begin(), ranks.end());
        EXPECT_EQ(ranks.back() - ranks.front() + 1, ranks.size());
      }
    }
  }
}

TEST(Inference, ModelPipelineIsDeterministic) {
  const auto clip = shuffle_clip(generated(4).clip, 1);
  const auto params = small_model(32, 16);
  const auto a = infer_order(clip, params, mode(LevelMode::frame_shot_scene));
  const auto b = infer_order(clip, params, mode(LevelMode::frame_shot_scene));
  EXPECT_EQ(a.order, b.order);
  EXPECT_EQ(a.trace.scene_partition, b.trace.scene_partition);
  EXPECT_EQ(a.trace.scene_embeddings.size(), clip.n_frames());
}

TEST(Counts, OracleAndFixed) {
  const auto clip = layered_clip({{2, 2}, {3}});
  const auto oracle = resolve_counts(clip, mode(LevelMode::frame_shot_scene));
  EXPECT_EQ(oracle.n_scenes, 2u);
  EXPECT_EQ(oracle.n_shots, 3u);
  EXPECT_EQ(resolve_counts(clip, mode(LevelMode::frame_shot)).n_scenes, 1u);

  auto cfg = mode(LevelMode::frame_shot_scene);
  cfg.counts = CountSource::fixed;
  cfg.n_scenes = 3;
  cfg.n_shots_per_scene = 2;
  const auto fixed = resolve_counts(clip, cfg);
  EXPECT_EQ(fixed.n_scenes, 3u);
  EXPECT_EQ(fixed.shots_per_scene, 2u);
  cfg.n_scenes = 8;
  EXPECT_THROW(resolve_counts(clip, cfg), std::invalid_argument);
  EXPECT_THROW(infer_order(clip, OracleScorer(clip), cfg), std::invalid_argument);
}

TEST(Counts, AllocateShotsProportionally) {
  EXPECT_EQ(allocate_shots(std::vector<std::size_t>{6, 3}, 3), (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(allocate_shots(std::vector<std::size_t>{5, 5}, 3), (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(allocate_shots(std::vector<std::size_t>{1, 9}, 2), (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(allocate_shots(std::vector<std::size_t>{2, 2}, 10), (std::vector<std::size_t>{2, 2}));
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> sizes(1 + trial % 4);
    for (auto& s : sizes) s = 1 + rng() % 8;
    const std::size_t frames = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
    const std::size_t total = sizes.size() + rng() % (frames - sizes.size() + 1);
    const auto out = allocate_shots(sizes, total);
    EXPECT_EQ(std::accumulate(out.begin(), out.end(), std::size_t{0}), total);
    for (std::size_t s = 0; s < sizes.size(); ++s) {
      EXPECT_GE(out[s], 1u);
      EXPECT_LE(out[s], sizes[s]);
    }
  }
}

TEST(Prediction, JsonRoundTrip) {
  const auto clip = shuffle_clip(generated(2).clip, 2);
  const auto res = infer_order(clip, OracleScorer(clip), mode(LevelMode::frame_shot_scene));
  const auto p = prediction_from_json(prediction_to_json(clip, res));
  EXPECT_EQ(p.clip_id, clip.clip_id);
  EXPECT_EQ(p.predicted_order, res.order.mapping());
  EXPECT_THROW(prediction_from_json(R"({"clip_id":"x"})"), std::invalid_argument);
}

TEST(Evaluation, IdentityOnTemporalClipsScoresOne) {
  const std::vector<ClipPuzzle> clips{layered_clip({{3}, {2}}, "b"), layered_clip({{1}}, "a")};
  const std::vector<int> betas{2, 3};
  const auto scores = score_clips(clips, identity_predictor(), betas);
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0].clip_id, "a");
  EXPECT_FALSE(scores[0].results[0].has_value());
  EXPECT_DOUBLE_EQ(scores[1].results[0]->score(), 1.0);
  EXPECT_DOUBLE_EQ(scores[1].results[1]->score(), 1.0);
  const auto rows = summarize_split("test", scores, betas);
  EXPECT_DOUBLE_EQ(rows[0].score, 100.0);
  EXPECT_EQ(rows[0].n_clips, 1u);
  EXPECT_THROW(summarize_split("empty", {}, betas), std::invalid_argument);
}

TEST(Evaluation, ModelPredictorReportsClusterIou) {
  const std::vector<ClipPuzzle> clips{shuffle_clip(generated(1).clip, 1), shuffle_clip(generated(2).clip, 2)};
  const std::vector<int> betas{2};
  const auto params = small_model(32, 16);
  const auto scores = score_clips(clips, model_predictor(params, mode(LevelMode::frame_shot_scene)), betas, 2);
  for (const auto& s : scores) {
    ASSERT_TRUE(s.scene_iou.has_value());
    ASSERT_TRUE(s.shot_iou.has_value());
    EXPECT_GE(*s.scene_iou, 0.0);
    EXPECT_LE(*s.shot_iou, 1.0);
  }
  const auto serial = score_clips(clips, model_predictor(params, mode(LevelMode::frame_shot_scene)), betas, 1);
  EXPECT_EQ(clip_scores_csv(scores, betas), clip_scores_csv(serial, betas));
}

TEST(Evaluation, TableAndRandomPredictors) {
  const auto clip = shuffle_clip(generated(3).clip, 3);
  Prediction p{clip.clip_id, ground_truth_permutation(clip).mapping()};
  const std::vector<int> betas{2};
  const auto scores = score_clips(std::span(&clip, 1), table_predictor({p}), betas);
  EXPECT_DOUBLE_EQ(scores[0].results[0]->score(), 1.0);
  EXPECT_THROW(table_predictor({})(clip), std::invalid_argument);
  EXPECT_EQ(random_predictor(4)(clip).order, random_predictor(4)(clip).order);
}
