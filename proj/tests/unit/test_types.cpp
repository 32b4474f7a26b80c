#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "hcmc/clip_io.hpp"
#include "hcmc/types.hpp"
#include "test_util.hpp"

using namespace hcmc;
using hcmc::testing::layered_clip;

TEST(Permutation, RejectsNonBijection) {
  EXPECT_THROW(Permutation({0, 0, 1}), std::invalid_argument);
  EXPECT_THROW(Permutation({0, 3, 1}), std::invalid_argument);
  EXPECT_NO_THROW(Permutation({2, 0, 1}));
}

TEST(Permutation, InverseAndApply) {
  const Permutation p({2, 0, 3, 1});
  const auto inv = p.inverse();
  for (std::size_t pos = 0; pos < p.size(); ++pos) EXPECT_EQ(inv[p[pos]], pos);
  const std::vector<char> items{'a', 'b', 'c', 'd'};
  EXPECT_EQ(p.apply(items), (std::vector<char>{'c', 'a', 'd', 'b'}));
  EXPECT_EQ(p.reversed().mapping(), (std::vector<std::size_t>{1, 3, 0, 2}));
  EXPECT_EQ(Permutation::identity(3).mapping(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(ValidateClip, AcceptsWellFormedClip) { EXPECT_TRUE(validate_clip(layered_clip({{2, 3}, {1}})).ok()); }

TEST(ValidateClip, ReportsEachViolation) {
  const auto base = layered_clip({{2, 2}});
  auto expect = [](ClipPuzzle c, const std::string& msg) { EXPECT_EQ(validate_clip(c).violation, msg); };

  expect(ClipPuzzle{"x", "m", {}}, "clip has no frames");
  auto c = base;
  c.frames[1].gt_index = 1;
  expect(c, "gt_index not a bijection");
  c = base;
  c.frames[3].gt_index = 9;
  expect(c, "gt_index not a bijection");
  c = base;
  c.frames[2].frame_id = c.frames[0].frame_id;
  expect(c, "duplicate frame_id");
  c = base;
  c.frames[0].vision_feat.push_back(1.0);
  expect(c, "feature dimensions differ between frames");
  c = base;
  c.frames[1].text_feat[0] = std::nan("");
  expect(c, "non-finite feature value");
  c = base;
  c.frames[0].start_ms = c.frames[0].end_ms + 1;
  expect(c, "start_ms after end_ms");
  c = base;
  c.frames[3].scene_id = 7;
  expect(c, "shot crosses scenes");
  c = base;
  for (auto& f : c.frames) f.vision_feat.clear();
  expect(c, "vision_feat has dimension 0");
}

TEST(GroundTruth, SortsPositionsByIndex) {
  auto clip = layered_clip({{4}});
  std::swap(clip.frames[0], clip.frames[3]);
  std::swap(clip.frames[1], clip.frames[2]);
  EXPECT_EQ(ground_truth_permutation(clip).mapping(), (std::vector<std::size_t>{3, 2, 1, 0}));
  clip.frames[0].gt_index = 2;
  EXPECT_THROW(ground_truth_permutation(clip), std::invalid_argument);
}

TEST(Hierarchy, GroupsByLabelsInFirstOccurrenceOrder) {
  auto clip = layered_clip({{2, 1}, {2}});
  std::swap(clip.frames[0], clip.frames[4]);  // scene 1 now appears first
  const auto h = hierarchy_from_labels(clip);
  ASSERT_EQ(h.n_scenes(), 2u);
  EXPECT_EQ(h.n_shots(), 3u);
  EXPECT_EQ(h.scenes[0].scene_key, 1);
  EXPECT_EQ(h.scene_partition()[0], (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(h.shot_partition().size(), 3u);
}

TEST(ClipIo, JsonRoundTrip) {
  auto clip = layered_clip({{2, 1}, {3}}, "clip_7");
  clip.frames[1].text_feat = {0.0, 0.0};
  clip.frames[2].vision_feat[0] = 0.1 + 0.2;  // needs all 17 digits
  const auto back = clip_from_json(clip_to_json(clip));
  EXPECT_EQ(back, clip);
  EXPECT_FALSE(back.frames[1].paired());
  EXPECT_THROW(clip_from_json("{\"clip_id\": 3}"), std::invalid_argument);
  EXPECT_THROW(clip_from_json("not json"), std::invalid_argument);
}

TEST(ClipIo, JsonlFileRoundTripSkipsBlankLines) {
  const auto dir = std::filesystem::temp_directory_path() / "hcmc_types_test";
  std::vector<ClipPuzzle> clips{layered_clip({{2}}, "a"), layered_clip({{1, 1}}, "b")};
  write_clips_jsonl(dir / "x.jsonl", clips);
  write_text_file(dir / "y.jsonl", read_text_file(dir / "x.jsonl") + "\n\n");
  EXPECT_EQ(read_clips_jsonl(dir / "y.jsonl"), clips);
  EXPECT_THROW(read_clips_jsonl(dir / "missing.jsonl"), std::runtime_error);
  std::filesystem::remove_all(dir);
}
