#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcmc/cluster.hpp"
#include "hcmc/model.hpp"
#include "hcmc/reorder.hpp"
#include "hcmc/types.hpp"

namespace hcmc {

/// Which hierarchy stages run. frame_only is one beam search over all frames.
enum class LevelMode { frame_only, frame_shot, frame_scene, frame_shot_scene };

std::string_view level_mode_name(LevelMode mode);
LevelMode parse_level_mode(std::string_view name);

bool uses_scenes(LevelMode mode);
bool uses_shots(LevelMode mode);

/// oracle: counts read from the clip's scene/shot labels. fixed: the config values.
enum class CountSource { oracle, fixed };

struct InferenceConfig {
  LevelMode level_mode = LevelMode::frame_shot_scene;
  std::size_t bsize = 8;
  ClusterConfig cluster;
  CountSource counts = CountSource::oracle;
  std::size_t n_scenes = 1;           // fixed mode
  std::size_t n_shots_per_scene = 1;  // fixed mode

  void validate() const;
};

/// A set of clip positions scored as one item.
struct Group {
  FeatureVector rep;
  std::vector<std::size_t> positions;
};

/// Supplies pairwise order logits and clustering embeddings to the pipeline.
class OrderScorer {
 public:
  virtual ~OrderScorer() = default;
  virtual Logits logits(Level level, const Group& a, const Group& b) const = 0;
  /// Clustering feature of one frame representation for the scene or shot stage.
  virtual FeatureVector embed(Level stage, const FeatureVector& frame_rep) const = 0;
};

/// phi heads score pairs; psi heads embed frames for clustering. Scene
/// clustering uses the shot-level psi head (trained to pull shots of a scene
/// together), shot clustering the frame-level head (frames of a shot).
class ModelScorer final : public OrderScorer {
 public:
  explicit ModelScorer(const ModelParams& params) : params_(params) {}
  Logits logits(Level level, const Group& a, const Group& b) const override;
  FeatureVector embed(Level stage, const FeatureVector& frame_rep) const override;

 private:
  const ModelParams& params_;
};

/// Test comparator reading gt_index: a confident forward logit when a's first
/// frame comes before b's, scaled down with temporal distance so the optimal
/// path visits groups in ground-truth order. Embeddings are the raw reps.
class OracleScorer final : public OrderScorer {
 public:
  explicit OracleScorer(const ClipPuzzle& clip, double confidence = 4.0);
  Logits logits(Level level, const Group& a, const Group& b) const override;
  FeatureVector embed(Level stage, const FeatureVector& frame_rep) const override;

 private:
  int first_index(const Group& g) const;
  std::vector<int> gt_index_;
  double confidence_;
};

struct ClusterCounts {
  std::size_t n_scenes = 1;
  std::size_t n_shots = 1;          // clip total, spread over scenes by size
  std::size_t shots_per_scene = 0;  // when nonzero, a fixed per-scene count
};

/// Resolves the counts for `clip`; throws std::invalid_argument when infeasible.
ClusterCounts resolve_counts(const ClipPuzzle& clip, const InferenceConfig& cfg);

/// Splits `total` shots over scenes proportionally to their sizes (largest
/// remainder, larger scenes first), at least 1 and at most the scene size each.
std::vector<std::size_t> allocate_shots(std::span<const std::size_t> scene_sizes, std::size_t total);

struct ClusterStages {
  Partition scene_partition;
  std::vector<Partition> shot_partitions;  // per scene, positions
  std::vector<FeatureVector> scene_centers;
  std::vector<FeatureVector> shot_centers;  // flattened over scenes
  bool degenerate = false;
};

/// Stages 1 and 2: k-means over per-position scene features, then per scene
/// over shot features. Stages disabled by the level mode yield one group.
ClusterStages cluster_hierarchy(std::span<const FeatureVector> scene_features,
                                std::span<const FeatureVector> shot_features, const ClusterCounts& counts,
                                const InferenceConfig& cfg);

struct InferenceTrace {
  LevelMode level_mode = LevelMode::frame_shot_scene;
  Partition scene_partition;
  std::vector<Partition> shot_partitions;
  /// Frame order inside each shot (positions), shots flattened over scenes.
  std::vector<std::vector<std::size_t>> frame_orders;
  /// Shot order inside each scene (indices into shot_partitions[scene]).
  std::vector<std::vector<std::size_t>> shot_orders;
  std::vector<std::size_t> scene_order;
  std::vector<double> frame_weights;
  std::vector<double> shot_weights;
  double scene_weight = 0.0;
  /// Per-position clustering embeddings and cluster centers, for cluster_iou.
  std::vector<FeatureVector> scene_embeddings;
  std::vector<FeatureVector> shot_embeddings;
  std::vector<FeatureVector> scene_centers;
  std::vector<FeatureVector> shot_centers;
};

struct InferenceResult {
  Permutation order;
  InferenceTrace trace;
};

/// Top-down clustering then bottom-up reordering. When `oracle_hierarchy` is
/// given it replaces both clustering stages.
InferenceResult infer_order(const ClipPuzzle& clip, const OrderScorer& scorer, const InferenceConfig& cfg,
                            const Hierarchy* oracle_hierarchy = nullptr);
InferenceResult infer_order(const ClipPuzzle& clip, const ModelParams& params, const InferenceConfig& cfg);

/// {clip_id, predicted_order, path_weights, scene_partition, shot_partitions}
std::string prediction_to_json(const ClipPuzzle& clip, const InferenceResult& result);

struct Prediction {
  std::string clip_id;
  std::vector<std::size_t> predicted_order;
};

Prediction prediction_from_json(std::string_view line);

}  // namespace hcmc
