#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "hcmc/model.hpp"
#include "hcmc/rng.hpp"

namespace hcmc {

std::vector<LevelItem> level_items(const ClipPuzzle& clip, Level level) {
  std::vector<LevelItem> frames;
  frames.reserve(clip.frames.size());
  for (const auto& f : clip.frames) {
    frames.push_back({encode_frame(f.vision_feat, f.text_feat), f.shot_id, f.gt_index});
  }
  if (level == Level::frame) return frames;

  const Hierarchy h = hierarchy_from_labels(clip);
  std::vector<LevelItem> shots;
  std::vector<std::vector<std::size_t>> shots_of_scene(h.scenes.size());
  for (std::size_t s = 0; s < h.scenes.size(); ++s) {
    for (const auto& shot : h.scenes[s].shots) {
      std::vector<FeatureVector> members;
      int first = frames[shot.frame_positions.front()].order_key;
      for (std::size_t p : shot.frame_positions) {
        members.push_back(frames[p].rep);
        first = std::min(first, frames[p].order_key);
      }
      shots_of_scene[s].push_back(shots.size());
      shots.push_back({pool_group(members), h.scenes[s].scene_key, first});
    }
  }
  if (level == Level::shot) return shots;

  std::vector<LevelItem> scenes;
  for (std::size_t s = 0; s < h.scenes.size(); ++s) {
    std::vector<FeatureVector> members;
    int first = shots[shots_of_scene[s].front()].order_key;
    for (std::size_t k : shots_of_scene[s]) {
      members.push_back(shots[k].rep);
      first = std::min(first, shots[k].order_key);
    }
    scenes.push_back({pool_group(members), 0, first});
  }
  return scenes;
}

PairSample sample_pairs(std::span<const ClipPuzzle> clips, const ModelConfig& config, Level level,
                        std::uint64_t seed) {
  std::vector<std::vector<LevelItem>> items;
  items.reserve(clips.size());
  for (const auto& clip : clips) {
    if (auto check = validate_clip(clip); !check.ok()) {
      throw std::invalid_argument("sample_pairs: clip '" + clip.clip_id + "': " + check.violation);
    }
    for (const auto& f : clip.frames) {
      if (f.vision_feat.size() != config.d_v || f.text_feat.size() != config.d_u) {
        throw std::invalid_argument("sample_pairs: clip '" + clip.clip_id + "' does not match model dims");
      }
    }
    items.push_back(level_items(clip, level));
  }

  Rng rng(seed);
  auto pick = [&rng](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::bernoulli_distribution coin(0.5);

  PairSample out;
  for (std::size_t c = 0; c < items.size(); ++c) {
    const auto& its = items[c];
    if (its.size() < 2) {
      ++out.skipped_clips;
      continue;
    }

    std::set<std::pair<std::size_t, std::size_t>> unordered;
    for (std::size_t i = 0; i < its.size(); ++i) {
      std::vector<std::size_t> same, other;
      for (std::size_t j = 0; j < its.size(); ++j) {
        if (j == i) continue;
        (its[j].group == its[i].group ? same : other).push_back(j);
      }
      const bool use_same = !same.empty() && (other.empty() || coin(rng));
      const auto& pool = use_same ? same : other;
      const std::size_t j = pool[pick(pool.size())];
      unordered.emplace(std::min(i, j), std::max(i, j));
    }

    for (const auto& [lo, hi] : unordered) {
      for (const auto& [x, y] : {std::pair{lo, hi}, std::pair{hi, lo}}) {
        std::vector<std::size_t> local;
        for (std::size_t k = 0; k < its.size(); ++k) {
          if (its[k].group != its[x].group && its[k].group != its[y].group) local.push_back(k);
        }
        std::vector<FeatureVector> negatives;
        negatives.reserve(config.n_negatives);
        if (!local.empty()) {
          for (std::size_t n = 0; n < config.n_negatives; ++n) negatives.push_back(its[local[pick(local.size())]].rep);
        } else if (items.size() > 1) {
          for (std::size_t n = 0; n < config.n_negatives; ++n) {
            std::size_t oc = pick(items.size() - 1);
            if (oc >= c) ++oc;
            negatives.push_back(items[oc][pick(items[oc].size())].rep);
          }
        }
        if (negatives.size() != config.n_negatives) {
          ++out.skipped_pairs;
          continue;
        }
        TrainingPair pair;
        pair.level = level;
        pair.a = its[x].rep;
        pair.b = its[y].rep;
        pair.order_label = its[x].order_key < its[y].order_key ? 1 : 0;
        pair.negatives = std::move(negatives);
        pair.same_group = its[x].group == its[y].group;
        out.pairs.push_back(std::move(pair));
      }
    }
  }
  std::shuffle(out.pairs.begin(), out.pairs.end(), rng);
  return out;
}

}  // namespace hcmc
