#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hcmc {

/// Flat real-valued feature vector. Dimensions are carried by size().
using FeatureVector = std::vector<double>;

bool all_finite(std::span<const double> values);

/// One puzzle piece: a frame's features plus its structural labels.
struct FrameRecord {
  std::int64_t frame_id = 0;
  FeatureVector vision_feat;
  FeatureVector text_feat;  // all zeros when the frame has no utterance
  std::int64_t start_ms = 0;
  std::int64_t end_ms = 0;
  std::int64_t shot_id = 0;
  std::int64_t scene_id = 0;
  int gt_index = 0;  // 1-based temporal index

  bool paired() const;

  bool operator==(const FrameRecord&) const = default;
};

/// A clip whose frames are stored in presentation (shuffled) order.
struct ClipPuzzle {
  std::string clip_id;
  std::string movie_id;
  std::vector<FrameRecord> frames;

  std::size_t n_frames() const { return frames.size(); }

  bool operator==(const ClipPuzzle&) const = default;
};

/// mapping()[p] is the item placed at position p.
class Permutation {
 public:
  Permutation() = default;
  /// Throws std::invalid_argument unless `mapping` is a bijection on {0..N-1}.
  explicit Permutation(std::vector<std::size_t> mapping);

  static Permutation identity(std::size_t n);
  static bool is_bijection(std::span<const std::size_t> mapping);

  std::size_t size() const { return mapping_.size(); }
  std::size_t operator[](std::size_t position) const { return mapping_[position]; }
  const std::vector<std::size_t>& mapping() const { return mapping_; }

  /// inverse()[item] is the position of `item`.
  Permutation inverse() const;
  Permutation reversed() const;

  /// out[p] = items[mapping[p]]
  template <class T>
  std::vector<T> apply(const std::vector<T>& items) const {
    std::vector<T> out;
    out.reserve(mapping_.size());
    for (std::size_t item : mapping_) out.push_back(items.at(item));
    return out;
  }

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<std::size_t> mapping_;
};

/// Groups of positions into ClipPuzzle::frames.
using Partition = std::vector<std::vector<std::size_t>>;

struct Shot {
  std::int64_t shot_key = 0;
  std::vector<std::size_t> frame_positions;
};

struct Scene {
  std::int64_t scene_key = 0;
  std::vector<Shot> shots;
};

/// scene -> shot -> frame grouping of a clip.
struct Hierarchy {
  std::vector<Scene> scenes;

  std::size_t n_scenes() const { return scenes.size(); }
  std::size_t n_shots() const;
  /// One group per scene holding every frame position of that scene.
  Partition scene_partition() const;
  /// One group per shot, scenes flattened in order.
  Partition shot_partition() const;
};

struct ClipValidation {
  std::string violation;  // empty when the clip is well formed

  bool ok() const { return violation.empty(); }
};

ClipValidation validate_clip(const ClipPuzzle& clip);

/// Positions sorted by ascending gt_index. Throws on an invalid clip.
Permutation ground_truth_permutation(const ClipPuzzle& clip);

/// Groups positions by (scene_id, shot_id); groups appear in first-occurrence order.
Hierarchy hierarchy_from_labels(const ClipPuzzle& clip);

}  // namespace hcmc
