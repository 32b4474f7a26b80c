#include "hcmc/types.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace hcmc {

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

bool FrameRecord::paired() const {
  return std::any_of(text_feat.begin(), text_feat.end(), [](double v) { return v != 0.0; });
}

Permutation::Permutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
  if (!is_bijection(mapping_)) {
    throw std::invalid_argument("permutation mapping is not a bijection");
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> mapping(n);
  std::iota(mapping.begin(), mapping.end(), std::size_t{0});
  return Permutation(std::move(mapping));
}

bool Permutation::is_bijection(std::span<const std::size_t> mapping) {
  std::vector<bool> seen(mapping.size(), false);
  for (std::size_t item : mapping) {
    if (item >= mapping.size() || seen[item]) return false;
    seen[item] = true;
  }
  return true;
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(mapping_.size());
  for (std::size_t p = 0; p < mapping_.size(); ++p) inv[mapping_[p]] = p;
  return Permutation(std::move(inv));
}

Permutation Permutation::reversed() const {
  return Permutation(std::vector<std::size_t>(mapping_.rbegin(), mapping_.rend()));
}

std::size_t Hierarchy::n_shots() const {
  std::size_t total = 0;
  for (const auto& scene : scenes) total += scene.shots.size();
  return total;
}

Partition Hierarchy::scene_partition() const {
  Partition out;
  out.reserve(scenes.size());
  for (const auto& scene : scenes) {
    std::vector<std::size_t> group;
    for (const auto& shot : scene.shots) {
      group.insert(group.end(), shot.frame_positions.begin(), shot.frame_positions.end());
    }
    out.push_back(std::move(group));
  }
  return out;
}

Partition Hierarchy::shot_partition() const {
  Partition out;
  for (const auto& scene : scenes) {
    for (const auto& shot : scene.shots) out.push_back(shot.frame_positions);
  }
  return out;
}

ClipValidation validate_clip(const ClipPuzzle& clip) {
  const auto n = clip.frames.size();
  if (n == 0) return {"clip has no frames"};

  const auto d_v = clip.frames.front().vision_feat.size();
  const auto d_u = clip.frames.front().text_feat.size();
  if (d_v == 0) return {"vision_feat has dimension 0"};
  if (d_u == 0) return {"text_feat has dimension 0"};

  std::unordered_set<std::int64_t> frame_ids;
  std::vector<bool> seen_index(n + 1, false);
  std::unordered_map<std::int64_t, std::int64_t> scene_of_shot;

  for (const auto& f : clip.frames) {
    if (f.vision_feat.size() != d_v || f.text_feat.size() != d_u) {
      return {"feature dimensions differ between frames"};
    }
    if (!all_finite(f.vision_feat) || !all_finite(f.text_feat)) {
      return {"non-finite feature value"};
    }
    if (f.start_ms > f.end_ms) return {"start_ms after end_ms"};
    if (!frame_ids.insert(f.frame_id).second) return {"duplicate frame_id"};
    if (f.gt_index < 1 || static_cast<std::size_t>(f.gt_index) > n ||
        seen_index[static_cast<std::size_t>(f.gt_index)]) {
      return {"gt_index not a bijection"};
    }
    seen_index[static_cast<std::size_t>(f.gt_index)] = true;
    auto [it, inserted] = scene_of_shot.emplace(f.shot_id, f.scene_id);
    if (!inserted && it->second != f.scene_id) return {"shot crosses scenes"};
  }
  return {};
}

Permutation ground_truth_permutation(const ClipPuzzle& clip) {
  if (auto check = validate_clip(clip); !check.ok()) {
    throw std::invalid_argument("invalid clip '" + clip.clip_id + "': " + check.violation);
  }
  std::vector<std::size_t> order(clip.frames.size());
  for (std::size_t p = 0; p < clip.frames.size(); ++p) {
    order[static_cast<std::size_t>(clip.frames[p].gt_index - 1)] = p;
  }
  return Permutation(std::move(order));
}

Hierarchy hierarchy_from_labels(const ClipPuzzle& clip) {
  Hierarchy h;
  std::map<std::int64_t, std::size_t> scene_slot;
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<std::size_t, std::size_t>> shot_slot;
  for (std::size_t p = 0; p < clip.frames.size(); ++p) {
    const auto& f = clip.frames[p];
    auto [sit, new_scene] = scene_slot.emplace(f.scene_id, h.scenes.size());
    if (new_scene) h.scenes.push_back(Scene{f.scene_id, {}});
    auto& scene = h.scenes[sit->second];
    auto [kit, new_shot] =
        shot_slot.emplace(std::make_pair(f.scene_id, f.shot_id), std::make_pair(sit->second, scene.shots.size()));
    if (new_shot) scene.shots.push_back(Shot{f.shot_id, {}});
    h.scenes[kit->second.first].shots[kit->second.second].frame_positions.push_back(p);
  }
  return h;
}

}  // namespace hcmc
