#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hcmc/clip_io.hpp"
#include "hcmc/datagen.hpp"
#include "hcmc/splits.hpp"

using namespace hcmc;

namespace {

double dist(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST(GenConfig, Validate) {
  EXPECT_NO_THROW(GenConfig{}.validate());
  GenConfig g;
  g.d_v = 8;  // 1 + 2 + 6 directions do not fit
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = GenConfig{};
  g.pair_rate = 1.5;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  g = GenConfig{};
  g.frames_per_shot = 0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(GenerateClip, ShapeLabelsAndCounts) {
  GenConfig g;
  g.n_scenes = 2;
  g.shots_per_scene = 4;
  g.frames_per_shot = 2;
  g.seed = 5;
  const auto gen = generate_clip(g, "x", "m");
  const auto& clip = gen.clip;
  ASSERT_EQ(clip.n_frames(), 16u);
  EXPECT_TRUE(validate_clip(clip).ok());
  EXPECT_EQ(gen.hierarchy.n_scenes(), 2u);
  EXPECT_EQ(gen.hierarchy.n_shots(), 8u);
  std::set<std::int64_t> ids;
  std::size_t paired = 0;
  for (std::size_t i = 0; i < clip.n_frames(); ++i) {
    const auto& f = clip.frames[i];
    EXPECT_EQ(f.gt_index, static_cast<int>(i + 1));
    EXPECT_EQ(f.scene_id, static_cast<std::int64_t>(i / 8));
    EXPECT_EQ(f.shot_id, static_cast<std::int64_t>(i / 2));
    EXPECT_EQ(f.vision_feat.size(), 32u);
    EXPECT_EQ(f.text_feat.size(), 16u);
    EXPECT_LT(f.start_ms, f.end_ms);
    ids.insert(f.frame_id);
    paired += f.paired() ? 1 : 0;
  }
  EXPECT_EQ(ids.size(), 16u);
  EXPECT_EQ(*ids.begin(), 1);
  EXPECT_EQ(paired, static_cast<std::size_t>(std::lround(0.835 * 16)));
}

TEST(GenerateClip, DeterministicPerSeed) {
  GenConfig g;
  g.seed = 9;
  EXPECT_EQ(generate_clip(g).clip, generate_clip(g).clip);
  GenConfig h = g;
  h.seed = 10;
  EXPECT_NE(generate_clip(g).clip, generate_clip(h).clip);
}

TEST(GenerateClip, NoiselessDistancesFollowTheGeometry) {
  GenConfig g;
  g.noise = 0.0;
  g.drift = 0.0;
  g.seed = 3;
  const auto clip = generate_clip(g).clip;
  const double same_scene = g.shot_sep * std::sqrt(2.0);
  const double cross_scene = std::sqrt(g.scene_sep * g.scene_sep + 2.0 * g.shot_sep * g.shot_sep);
  for (const auto& a : clip.frames) {
    for (const auto& b : clip.frames) {
      const double d = dist(a.vision_feat, b.vision_feat);
      if (a.shot_id == b.shot_id) {
        EXPECT_NEAR(d, 0.0, 1e-9);
      } else if (a.scene_id == b.scene_id) {
        EXPECT_NEAR(d, same_scene, 1e-9);
      } else {
        EXPECT_NEAR(d, cross_scene, 1e-9);
      }
    }
  }
}

TEST(GenerateClip, DriftMovesAlongSharedDirection) {
  GenConfig g;
  g.noise = 0.0;
  g.n_scenes = 1;
  g.shots_per_scene = 1;
  g.frames_per_shot = 4;
  g.seed = 8;
  const auto clip = generate_clip(g).clip;
  const auto d = drift_direction(g.d_v, g.world_seed);
  for (std::size_t i = 1; i < clip.n_frames(); ++i) {
    for (std::size_t k = 0; k < g.d_v; ++k) {
      EXPECT_NEAR(clip.frames[i].vision_feat[k] - clip.frames[i - 1].vision_feat[k], g.drift * d[k], 1e-12);
    }
  }
}

TEST(ShuffleClip, EveryOrderEquallyLikely) {
  GenConfig g;
  g.n_scenes = 1;
  g.shots_per_scene = 1;
  g.frames_per_shot = 3;
  const auto clip = generate_clip(g).clip;
  std::map<std::vector<int>, int> counts;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    const auto s = shuffle_clip(clip, static_cast<std::uint64_t>(t));
    std::vector<int> key;
    for (const auto& f : s.frames) key.push_back(f.gt_index);
    ++counts[key];
  }
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [order, n] : counts) EXPECT_NEAR(n / static_cast<double>(trials), 1.0 / 6.0, 0.02);
}

TEST(ShuffleClip, KeepsFramesAndLabels) {
  GenConfig g;
  g.seed = 1;
  const auto clip = generate_clip(g).clip;
  const auto s = shuffle_clip(clip, 7);
  EXPECT_TRUE(validate_clip(s).ok());
  std::vector<int> gt(s.n_frames());
  for (std::size_t i = 0; i < s.n_frames(); ++i) gt[i] = s.frames[i].gt_index;
  EXPECT_FALSE(std::is_sorted(gt.begin(), gt.end()));
  EXPECT_EQ(ground_truth_permutation(s).apply(s.frames), clip.frames);
}

TEST(Dataset, SplitSizesAndDisjointness) {
  DatasetConfig cfg;
  cfg.shapes = default_shapes(GenConfig{});
  cfg.n_clips = 1000;
  cfg.seed = 4;
  const auto splits = generate_dataset(cfg);
  EXPECT_EQ(splits.train.size(), 700u);
  EXPECT_EQ(splits.val.size(), 60u);
  EXPECT_EQ(splits.test_in.size(), 120u);
  EXPECT_EQ(splits.test_out.size(), 120u);

  std::set<std::string> ids;
  std::set<std::string> in_movies, out_movies;
  for (auto name : kSplitNames) {
    for (const auto& c : splits.by_name(name)) {
      EXPECT_TRUE(ids.insert(c.clip_id).second) << c.clip_id;
      (name == "test_out" ? out_movies : in_movies).insert(c.movie_id);
    }
  }
  EXPECT_EQ(ids.size(), 1000u);
  for (const auto& m : out_movies) EXPECT_EQ(in_movies.count(m), 0u) << m;
}

TEST(Dataset, DeterministicAndSeedSensitive) {
  DatasetConfig cfg;
  cfg.shapes = default_shapes(GenConfig{});
  cfg.n_clips = 60;
  cfg.seed = 2;
  const auto a = generate_clips(cfg);
  EXPECT_EQ(a, generate_clips(cfg));
  EXPECT_EQ(a[0].clip_id, "m0000_c000");
  EXPECT_EQ(a[13].movie_id, "movie_0001");
  cfg.seed = 3;
  EXPECT_NE(a, generate_clips(cfg));
  EXPECT_NE(dataset_manifest_json(cfg).find("\"n_clips\": 60"), std::string::npos);
}

TEST(Splits, RatiosAndSmallInputs) {
  SplitRatios bad;
  bad.train = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);

  DatasetConfig cfg;
  cfg.shapes = default_shapes(GenConfig{});
  cfg.n_clips = 100;
  const auto clips = generate_clips(cfg);
  const auto a = split_dataset(clips, SplitRatios{}, 1);
  const auto b = split_dataset(clips, SplitRatios{}, 1);
  EXPECT_EQ(a.test_out, b.test_out);
  EXPECT_EQ(a.train.size() + a.val.size() + a.test_in.size() + a.test_out.size(), 100u);
  EXPECT_FALSE(a.train.empty());

  // A single movie cannot supply a disjoint out-of-domain split.
  cfg.clips_per_movie = 100;
  EXPECT_THROW(split_dataset(generate_clips(cfg), SplitRatios{}, 1), std::invalid_argument);
}

TEST(Splits, HeldOutClipsAreEquallySpacedWithinEachMovie) {
  DatasetConfig cfg;
  cfg.shapes = default_shapes(GenConfig{});
  cfg.n_clips = 60;
  cfg.clips_per_movie = 20;
  const auto clips = generate_clips(cfg);
  SplitRatios r;
  r.train = 0.8;
  r.val = 0.1;
  r.test_in = 0.1;
  r.test_out = 0.0;
  const auto s = split_dataset(clips, r, 1);
  ASSERT_EQ(s.val.size(), 6u);
  ASSERT_EQ(s.test_in.size(), 6u);
  EXPECT_TRUE(s.test_out.empty());

  // 4 of 20 per movie at ordinals 2, 7, 12, 17, alternating val and test_in.
  std::map<std::string, std::vector<std::size_t>> held;
  for (const auto* split : {&s.val, &s.test_in}) {
    for (const auto& c : *split) {
      for (std::size_t i = 0; i < clips.size(); ++i) {
        if (clips[i].clip_id == c.clip_id) held[c.movie_id].push_back(i % 20);
      }
    }
  }
  ASSERT_EQ(held.size(), 3u);
  for (auto& [movie, ordinals] : held) {
    std::sort(ordinals.begin(), ordinals.end());
    EXPECT_EQ(ordinals, (std::vector<std::size_t>{2, 7, 12, 17})) << movie;
  }
  EXPECT_EQ(s.test_in[0].clip_id, clips[2].clip_id);
  EXPECT_EQ(s.val[0].clip_id, clips[7].clip_id);
}

TEST(ClipIo, GeneratedClipsSurviveJsonl) {
  DatasetConfig cfg;
  cfg.shapes = default_shapes(GenConfig{});
  cfg.n_clips = 12;
  const auto clips = generate_clips(cfg);
  const auto path = std::filesystem::temp_directory_path() / "hcmc_test_datagen.jsonl";
  write_clips_jsonl(path, clips);
  EXPECT_EQ(read_clips_jsonl(path), clips);
  std::filesystem::remove(path);
}
