#include "hcmc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hcmc/rng.hpp"

namespace hcmc {

namespace {

constexpr std::pair<LevelMode, std::string_view> kModeNames[] = {
    {LevelMode::frame_only, "frame_only"},
    {LevelMode::frame_shot, "frame_shot"},
    {LevelMode::frame_scene, "frame_scene"},
    {LevelMode::frame_shot_scene, "frame_shot_scene"},
};

FeatureVector mean_of(std::span<const FeatureVector> features, std::span<const std::size_t> members) {
  std::vector<FeatureVector> picked;
  picked.reserve(members.size());
  for (std::size_t p : members) picked.push_back(features[p]);
  return pool_group(picked);
}

// k-means over the given positions; returns groups of positions.
KMeansResult cluster_positions(std::span<const FeatureVector> features, std::span<const std::size_t> positions,
                               std::size_t m, ClusterConfig cluster, std::uint64_t seed) {
  std::vector<FeatureVector> pts;
  pts.reserve(positions.size());
  for (std::size_t p : positions) pts.push_back(features[p]);
  cluster.m = std::min(m, positions.size());
  cluster.seed = seed;
  auto res = kmeans(pts, cluster);
  for (auto& group : res.partition) {
    for (auto& idx : group) idx = positions[idx];
  }
  return res;
}

PathResult order_groups(const OrderScorer& scorer, Level level, std::span<const Group> groups, std::size_t bsize) {
  const auto s = score_matrix(groups.size(),
                              [&](std::size_t i, std::size_t j) { return scorer.logits(level, groups[i], groups[j]); });
  return beam_search(s, bsize);
}

}  // namespace

std::string_view level_mode_name(LevelMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  throw std::invalid_argument("unknown level mode");
}

LevelMode parse_level_mode(std::string_view name) {
  for (const auto& [m, n] : kModeNames) {
    if (n == name) return m;
  }
  throw std::invalid_argument("unknown level mode '" + std::string(name) +
                              "' (expected frame_only, frame_shot, frame_scene or frame_shot_scene)");
}

bool uses_scenes(LevelMode mode) { return mode == LevelMode::frame_scene || mode == LevelMode::frame_shot_scene; }
bool uses_shots(LevelMode mode) { return mode == LevelMode::frame_shot || mode == LevelMode::frame_shot_scene; }

void InferenceConfig::validate() const {
  if (bsize == 0) throw std::invalid_argument("bsize must be >= 1");
  if (cluster.max_steps == 0) throw std::invalid_argument("max cluster steps must be >= 1");
  if (counts == CountSource::fixed && (n_scenes == 0 || n_shots_per_scene == 0)) {
    throw std::invalid_argument("fixed cluster counts must be >= 1");
  }
}

Logits ModelScorer::logits(Level level, const Group& a, const Group& b) const {
  return phi_forward(params_, level, a.rep, b.rep);
}

FeatureVector ModelScorer::embed(Level stage, const FeatureVector& frame_rep) const {
  return psi_forward(params_, stage == Level::scene ? Level::shot : Level::frame, frame_rep);
}

OracleScorer::OracleScorer(const ClipPuzzle& clip, double confidence) : confidence_(confidence) {
  for (const auto& f : clip.frames) gt_index_.push_back(f.gt_index);
}

int OracleScorer::first_index(const Group& g) const {
  int first = gt_index_.at(g.positions.at(0));
  for (std::size_t p : g.positions) first = std::min(first, gt_index_.at(p));
  return first;
}

Logits OracleScorer::logits(Level, const Group& a, const Group& b) const {
  const int delta = first_index(b) - first_index(a);
  if (delta == 0) return {0.0, 0.0};
  const double margin = confidence_ / std::abs(delta);
  return delta > 0 ? Logits{0.0, margin} : Logits{margin, 0.0};
}

FeatureVector OracleScorer::embed(Level, const FeatureVector& frame_rep) const { return frame_rep; }

ClusterCounts resolve_counts(const ClipPuzzle& clip, const InferenceConfig& cfg) {
  const std::size_t n = clip.n_frames();
  ClusterCounts counts;
  if (cfg.counts == CountSource::oracle) {
    const Hierarchy h = hierarchy_from_labels(clip);
    counts.n_scenes = h.n_scenes();
    counts.n_shots = h.n_shots();
  } else {
    counts.n_scenes = cfg.n_scenes;
    counts.shots_per_scene = cfg.n_shots_per_scene;
    counts.n_shots = cfg.n_scenes * cfg.n_shots_per_scene;
  }
  if (!uses_scenes(cfg.level_mode)) counts.n_scenes = 1;
  if (uses_scenes(cfg.level_mode) && counts.n_scenes > n) {
    throw std::invalid_argument("clip '" + clip.clip_id + "': " + std::to_string(counts.n_scenes) +
                                " scenes requested for " + std::to_string(n) + " frames");
  }
  if (uses_shots(cfg.level_mode) && counts.n_shots > n && cfg.counts == CountSource::oracle) {
    throw std::invalid_argument("clip '" + clip.clip_id + "': shot count exceeds frame count");
  }
  counts.n_shots = std::min(counts.n_shots, n);
  return counts;
}

std::vector<std::size_t> allocate_shots(std::span<const std::size_t> scene_sizes, std::size_t total) {
  const std::size_t k = scene_sizes.size();
  const std::size_t frames = std::accumulate(scene_sizes.begin(), scene_sizes.end(), std::size_t{0});
  std::vector<std::size_t> out(k, 1);
  if (k == 0) return out;
  total = std::clamp(total, k, frames);

  std::vector<double> remainder(k, 0.0);
  std::size_t given = 0;
  for (std::size_t s = 0; s < k; ++s) {
    const double exact = static_cast<double>(total) * static_cast<double>(scene_sizes[s]) / static_cast<double>(frames);
    out[s] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(exact)), 1, scene_sizes[s]);
    remainder[s] = exact - std::floor(exact);
    given += out[s];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return scene_sizes[a] > scene_sizes[b];
  });
  while (given < total) {
    bool progressed = false;
    for (std::size_t s : order) {
      if (given == total) break;
      if (out[s] < scene_sizes[s]) {
        ++out[s];
        ++given;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  while (given > total) {
    // Minimum-one floors overshot: take back from the scenes with the most shots.
    auto it = std::max_element(out.begin(), out.end());
    if (*it <= 1) break;
    --*it;
    --given;
  }
  return out;
}

ClusterStages cluster_hierarchy(std::span<const FeatureVector> scene_features,
                                std::span<const FeatureVector> shot_features, const ClusterCounts& counts,
                                const InferenceConfig& cfg) {
  const std::size_t n = scene_features.size();
  if (shot_features.size() != n) throw std::invalid_argument("cluster_hierarchy: feature counts differ");
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  ClusterStages out;
  if (uses_scenes(cfg.level_mode)) {
    auto res = cluster_positions(scene_features, all, counts.n_scenes, cfg.cluster,
                                 derive_seed(cfg.cluster.seed, "infer.scenes"));
    out.scene_partition = std::move(res.partition);
    out.scene_centers = std::move(res.centroids);
    out.degenerate = res.degenerate;
  } else {
    out.scene_partition = {all};
    out.scene_centers = {mean_of(scene_features, all)};
  }

  std::vector<std::size_t> sizes;
  for (const auto& scene : out.scene_partition) sizes.push_back(scene.size());
  std::vector<std::size_t> shot_counts;
  if (counts.shots_per_scene > 0) {
    for (std::size_t sz : sizes) shot_counts.push_back(std::min(counts.shots_per_scene, sz));
  } else {
    shot_counts = allocate_shots(sizes, counts.n_shots);
  }

  for (std::size_t s = 0; s < out.scene_partition.size(); ++s) {
    const auto& scene = out.scene_partition[s];
    if (uses_shots(cfg.level_mode)) {
      auto res = cluster_positions(shot_features, scene, shot_counts[s], cfg.cluster,
                                   derive_seed(cfg.cluster.seed, "infer.shots", s));
      out.shot_partitions.push_back(std::move(res.partition));
      for (auto& c : res.centroids) out.shot_centers.push_back(std::move(c));
      out.degenerate = out.degenerate || res.degenerate;
    } else {
      out.shot_partitions.push_back({scene});
      out.shot_centers.push_back(mean_of(shot_features, scene));
    }
  }
  return out;
}

InferenceResult infer_order(const ClipPuzzle& clip, const OrderScorer& scorer, const InferenceConfig& cfg,
                            const Hierarchy* oracle_hierarchy) {
  cfg.validate();
  if (auto check = validate_clip(clip); !check.ok()) {
    throw std::invalid_argument("clip '" + clip.clip_id + "': " + check.violation);
  }
  const std::size_t n = clip.n_frames();

  std::vector<FeatureVector> reps;
  reps.reserve(n);
  for (const auto& f : clip.frames) reps.push_back(encode_frame(f.vision_feat, f.text_feat));

  InferenceTrace trace;
  trace.level_mode = cfg.level_mode;
  if (uses_scenes(cfg.level_mode) || uses_shots(cfg.level_mode)) {
    for (const auto& r : reps) {
      trace.scene_embeddings.push_back(scorer.embed(Level::scene, r));
      trace.shot_embeddings.push_back(scorer.embed(Level::shot, r));
    }
  }

  if (oracle_hierarchy != nullptr) {
    for (const auto& scene : oracle_hierarchy->scenes) {
      Partition shots;
      std::vector<std::size_t> scene_positions;
      for (const auto& shot : scene.shots) {
        shots.push_back(shot.frame_positions);
        scene_positions.insert(scene_positions.end(), shot.frame_positions.begin(), shot.frame_positions.end());
      }
      std::sort(scene_positions.begin(), scene_positions.end());
      trace.scene_partition.push_back(std::move(scene_positions));
      trace.shot_partitions.push_back(std::move(shots));
    }
    if (!uses_scenes(cfg.level_mode)) {
      Partition shots;
      std::vector<std::size_t> all;
      for (std::size_t s = 0; s < trace.scene_partition.size(); ++s) {
        for (auto& shot : trace.shot_partitions[s]) shots.push_back(std::move(shot));
      }
      std::sort(shots.begin(), shots.end());
      for (const auto& shot : shots) all.insert(all.end(), shot.begin(), shot.end());
      std::sort(all.begin(), all.end());
      trace.scene_partition = {all};
      trace.shot_partitions = {shots};
    }
    if (!uses_shots(cfg.level_mode)) {
      for (std::size_t s = 0; s < trace.scene_partition.size(); ++s) {
        trace.shot_partitions[s] = {trace.scene_partition[s]};
      }
    }
    if (!trace.scene_embeddings.empty()) {
      for (const auto& scene : trace.scene_partition) {
        trace.scene_centers.push_back(mean_of(trace.scene_embeddings, scene));
      }
      for (const auto& shots : trace.shot_partitions) {
        for (const auto& shot : shots) trace.shot_centers.push_back(mean_of(trace.shot_embeddings, shot));
      }
    }
  } else if (uses_scenes(cfg.level_mode) || uses_shots(cfg.level_mode)) {
    auto stages = cluster_hierarchy(trace.scene_embeddings, trace.shot_embeddings, resolve_counts(clip, cfg), cfg);
    trace.scene_partition = std::move(stages.scene_partition);
    trace.shot_partitions = std::move(stages.shot_partitions);
    trace.scene_centers = std::move(stages.scene_centers);
    trace.shot_centers = std::move(stages.shot_centers);
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    trace.scene_partition = {all};
    trace.shot_partitions = {{all}};
  }

  // Stage 3: frames within each shot. Stage 4: shots within each scene. Stage 5: scenes.
  std::vector<Group> scene_groups;
  std::vector<std::vector<std::size_t>> scene_sequences;
  for (const auto& shots : trace.shot_partitions) {
    std::vector<Group> shot_groups;
    std::vector<std::vector<std::size_t>> shot_sequences;
    for (const auto& shot : shots) {
      std::vector<Group> frames;
      for (std::size_t p : shot) frames.push_back({reps[p], {p}});
      const PathResult path = order_groups(scorer, Level::frame, frames, cfg.bsize);
      std::vector<std::size_t> seq;
      std::vector<FeatureVector> members;
      for (std::size_t k : path.order.mapping()) {
        seq.push_back(shot[k]);
        members.push_back(reps[shot[k]]);
      }
      trace.frame_orders.push_back(seq);
      trace.frame_weights.push_back(path.weight);
      shot_groups.push_back({pool_group(members), seq});
      shot_sequences.push_back(std::move(seq));
    }
    const PathResult path = order_groups(scorer, Level::shot, shot_groups, cfg.bsize);
    trace.shot_orders.push_back(path.order.mapping());
    trace.shot_weights.push_back(path.weight);
    std::vector<std::size_t> seq;
    std::vector<FeatureVector> members;
    for (std::size_t k : path.order.mapping()) {
      seq.insert(seq.end(), shot_sequences[k].begin(), shot_sequences[k].end());
      members.push_back(shot_groups[k].rep);
    }
    scene_groups.push_back({pool_group(members), seq});
    scene_sequences.push_back(std::move(seq));
  }
  const PathResult path = order_groups(scorer, Level::scene, scene_groups, cfg.bsize);
  trace.scene_order = path.order.mapping();
  trace.scene_weight = path.weight;

  std::vector<std::size_t> final_order;
  final_order.reserve(n);
  for (std::size_t k : trace.scene_order) {
    final_order.insert(final_order.end(), scene_sequences[k].begin(), scene_sequences[k].end());
  }
  return {Permutation(std::move(final_order)), std::move(trace)};
}

InferenceResult infer_order(const ClipPuzzle& clip, const ModelParams& params, const InferenceConfig& cfg) {
  return infer_order(clip, ModelScorer(params), cfg);
}

std::string prediction_to_json(const ClipPuzzle& clip, const InferenceResult& result) {
  nlohmann::json j;
  j["clip_id"] = clip.clip_id;
  j["predicted_order"] = result.order.mapping();
  j["path_weights"] = {{"frame", result.trace.frame_weights},
                       {"shot", result.trace.shot_weights},
                       {"scene", result.trace.scene_weight}};
  j["scene_partition"] = result.trace.scene_partition;
  j["shot_partitions"] = result.trace.shot_partitions;
  return j.dump();
}

Prediction prediction_from_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    return {j.at("clip_id").get<std::string>(), j.at("predicted_order").get<std::vector<std::size_t>>()};
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad prediction record: ") + e.what());
  }
}

}  // namespace hcmc
