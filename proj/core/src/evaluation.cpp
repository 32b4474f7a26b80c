#include "hcmc/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "hcmc/rng.hpp"

namespace hcmc {

namespace {

double partition_iou(const Partition& pred, const Partition& gt, std::span<const FeatureVector> centers,
                     std::span<const FeatureVector> features) {
  return cluster_iou(pred, gt, centers, features).mean_iou;
}

Partition flatten(const std::vector<Partition>& nested) {
  Partition out;
  for (const auto& p : nested) out.insert(out.end(), p.begin(), p.end());
  return out;
}

ClipScore score_one(const ClipPuzzle& clip, const Predictor& predictor, std::span<const int> betas) {
  const Permutation gt = ground_truth_permutation(clip);
  const PredictorOutput out = predictor(clip);
  if (out.order.size() != clip.n_frames()) {
    throw std::invalid_argument("prediction for clip '" + clip.clip_id + "' has the wrong length");
  }
  ClipScore score{clip.clip_id, clip.n_frames(), {}, std::nullopt, std::nullopt};
  for (int beta : betas) {
    if (static_cast<std::size_t>(beta) > clip.n_frames()) {
      score.results.emplace_back();
    } else {
      score.results.emplace_back(ordering_score(gt, out.order, beta));
    }
  }
  if (out.trace && !out.trace->scene_embeddings.empty()) {
    const auto& t = *out.trace;
    const Hierarchy h = hierarchy_from_labels(clip);
    if (uses_scenes(t.level_mode)) {
      score.scene_iou = partition_iou(t.scene_partition, h.scene_partition(), t.scene_centers, t.scene_embeddings);
    }
    if (uses_shots(t.level_mode)) {
      score.shot_iou =
          partition_iou(flatten(t.shot_partitions), h.shot_partition(), t.shot_centers, t.shot_embeddings);
    }
  }
  return score;
}

}  // namespace

Predictor identity_predictor() {
  return [](const ClipPuzzle& clip) { return PredictorOutput{ground_truth_permutation(clip), std::nullopt}; };
}

Predictor random_predictor(std::uint64_t seed) {
  return [seed](const ClipPuzzle& clip) {
    std::vector<std::size_t> order(clip.n_frames());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, "predict.random." + clip.clip_id));
    std::shuffle(order.begin(), order.end(), rng);
    return PredictorOutput{Permutation(std::move(order)), std::nullopt};
  };
}

Predictor model_predictor(const ModelParams& params, const InferenceConfig& cfg) {
  return [&params, cfg](const ClipPuzzle& clip) {
    auto res = infer_order(clip, params, cfg);
    return PredictorOutput{std::move(res.order), std::move(res.trace)};
  };
}

Predictor table_predictor(std::vector<Prediction> predictions) {
  auto table = std::make_shared<std::map<std::string, std::vector<std::size_t>>>();
  for (auto& p : predictions) {
    if (!table->emplace(p.clip_id, std::move(p.predicted_order)).second) {
      throw std::invalid_argument("duplicate prediction for clip '" + p.clip_id + "'");
    }
  }
  return [table](const ClipPuzzle& clip) {
    auto it = table->find(clip.clip_id);
    if (it == table->end()) throw std::invalid_argument("no prediction for clip '" + clip.clip_id + "'");
    return PredictorOutput{Permutation(it->second), std::nullopt};
  };
}

std::vector<ClipScore> score_clips(std::span<const ClipPuzzle> clips, const Predictor& predictor,
                                   std::span<const int> betas, std::size_t jobs) {
  std::vector<ClipScore> scores(clips.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < clips.size(); i = next++) {
      try {
        scores[i] = score_one(clips[i], predictor, betas);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = clips.size();
      }
    }
  };
  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, clips.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  std::stable_sort(scores.begin(), scores.end(),
                   [](const ClipScore& a, const ClipScore& b) { return a.clip_id < b.clip_id; });
  return scores;
}

std::vector<SplitRow> summarize_split(const std::string& split, std::span<const ClipScore> scores,
                                      std::span<const int> betas) {
  if (scores.empty()) throw std::invalid_argument("split '" + split + "' is empty");
  double scene_sum = 0.0, shot_sum = 0.0;
  std::size_t scene_n = 0, shot_n = 0;
  for (const auto& s : scores) {
    if (s.scene_iou) scene_sum += *s.scene_iou, ++scene_n;
    if (s.shot_iou) shot_sum += *s.shot_iou, ++shot_n;
  }
  std::vector<SplitRow> rows;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    SplitRow row{split, betas[b], 0, 0.0, std::nullopt, std::nullopt};
    double sum = 0.0;
    for (const auto& s : scores) {
      if (!s.results.at(b)) continue;
      sum += 100.0 * s.results[b]->score();
      ++row.n_clips;
    }
    if (row.n_clips > 0) row.score = sum / static_cast<double>(row.n_clips);
    if (scene_n > 0) row.scene_iou = scene_sum / static_cast<double>(scene_n);
    if (shot_n > 0) row.shot_iou = shot_sum / static_cast<double>(shot_n);
    rows.push_back(row);
  }
  return rows;
}

std::string clip_scores_csv(std::span<const ClipScore> scores, std::span<const int> betas) {
  std::string out = "clip_id,n_frames,beta,matches,total,score\n";
  char buf[160];
  for (const auto& s : scores) {
    for (std::size_t b = 0; b < betas.size(); ++b) {
      if (!s.results.at(b)) continue;
      const auto& r = *s.results[b];
      std::snprintf(buf, sizeof buf, ",%zu,%d,%llu,%llu,%.17g\n", s.n_frames, betas[b],
                    static_cast<unsigned long long>(r.matches), static_cast<unsigned long long>(r.total),
                    100.0 * r.score());
      out += s.clip_id;
      out += buf;
    }
  }
  return out;
}

std::string split_table_csv(std::span<const SplitRow> rows) {
  std::string out = "split,beta,n_clips,score,scene_iou,shot_iou\n";
  char buf[160];
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char b[32];
    std::snprintf(b, sizeof b, "%.4f", *v);
    return std::string(b);
  };
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, ",%d,%zu,%.4f,", r.beta, r.n_clips, r.score);
    out += r.split + buf + opt(r.scene_iou) + "," + opt(r.shot_iou) + "\n";
  }
  return out;
}

}  // namespace hcmc
