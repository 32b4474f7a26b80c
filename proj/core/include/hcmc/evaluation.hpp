#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcmc/inference.hpp"
#include "hcmc/metrics.hpp"
#include "hcmc/types.hpp"

namespace hcmc {

struct ClipScore {
  std::string clip_id;
  std::size_t n_frames = 0;
  /// Parallel to the requested betas; empty when the clip is shorter than beta.
  std::vector<std::optional<OrderingResult>> results;
  std::optional<double> scene_iou;
  std::optional<double> shot_iou;
};

/// Predicted order plus, when clustering ran, the trace needed for cluster_iou.
struct PredictorOutput {
  Permutation order;
  std::optional<InferenceTrace> trace;
};

using Predictor = std::function<PredictorOutput(const ClipPuzzle&)>;

Predictor identity_predictor();
/// Uniform shuffle seeded by (seed, clip_id).
Predictor random_predictor(std::uint64_t seed);
Predictor model_predictor(const ModelParams& params, const InferenceConfig& cfg);
/// Looks predictions up by clip_id; throws std::invalid_argument if one is missing.
Predictor table_predictor(std::vector<Prediction> predictions);

/// Scores every clip, running up to `jobs` threads. Results are sorted by clip_id.
std::vector<ClipScore> score_clips(std::span<const ClipPuzzle> clips, const Predictor& predictor,
                                   std::span<const int> betas, std::size_t jobs = 1);

struct SplitRow {
  std::string split;
  int beta = 2;
  std::size_t n_clips = 0;
  double score = 0.0;  // mean ordering score in percent
  std::optional<double> scene_iou;
  std::optional<double> shot_iou;
};

/// Mean scores per beta. Throws std::invalid_argument on an empty split.
std::vector<SplitRow> summarize_split(const std::string& split, std::span<const ClipScore> scores,
                                      std::span<const int> betas);

/// clip_id,n_frames,beta,matches,total,score
std::string clip_scores_csv(std::span<const ClipScore> scores, std::span<const int> betas);
/// split,beta,n_clips,score,scene_iou,shot_iou
std::string split_table_csv(std::span<const SplitRow> rows);

}  // namespace hcmc
