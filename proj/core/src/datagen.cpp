#include "hcmc/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hcmc/rng.hpp"

namespace hcmc {

namespace {

FeatureVector gaussian_vector(std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureVector v(dim);
  for (double& x : v) x = normal(rng);
  return v;
}

double dot(const FeatureVector& a, const FeatureVector& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Appends a random unit vector orthogonal to every vector already in `basis`.
void extend_basis(std::vector<FeatureVector>& basis, std::size_t dim, Rng& rng) {
  for (;;) {
    FeatureVector v = gaussian_vector(dim, rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = dot(v, b);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= c * b[i];
      }
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm < 1e-6) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
    return;
  }
}

// Row-major d_u x d_v map with N(0, 1/d_v) entries.
std::vector<double> text_map(const GenConfig& cfg) {
  Rng rng(derive_seed(cfg.world_seed, "datagen.text_map"));
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(cfg.d_v)));
  std::vector<double> m(cfg.d_u * cfg.d_v);
  for (double& x : m) x = normal(rng);
  return m;
}

}  // namespace

void GenConfig::validate() const {
  if (n_scenes == 0 || shots_per_scene == 0 || frames_per_shot == 0) {
    throw std::invalid_argument("scene, shot and frame counts must be >= 1");
  }
  if (d_v == 0 || d_u == 0) throw std::invalid_argument("feature dimensions must be >= 1");
  if (!(scene_sep > 0.0) || !(shot_sep > 0.0)) throw std::invalid_argument("separations must be > 0");
  if (!(drift >= 0.0) || !(noise >= 0.0) || !(text_scale >= 0.0)) {
    throw std::invalid_argument("drift, noise and text_scale must be >= 0");
  }
  if (!(pair_rate >= 0.0 && pair_rate <= 1.0)) throw std::invalid_argument("pair_rate must lie in [0, 1]");
  const std::size_t needed = 1 + n_scenes + n_scenes * shots_per_scene;
  if (needed > d_v) {
    throw std::invalid_argument("d_v=" + std::to_string(d_v) + " too small for " + std::to_string(needed) +
                                " orthogonal directions");
  }
}

FeatureVector drift_direction(std::size_t d_v, std::uint64_t world_seed) {
  Rng rng(derive_seed(world_seed, "datagen.drift"));
  std::vector<FeatureVector> basis;
  extend_basis(basis, d_v, rng);
  return basis.front();
}

GeneratedClip generate_clip(const GenConfig& cfg, const std::string& clip_id, const std::string& movie_id) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<FeatureVector> basis{drift_direction(cfg.d_v, cfg.world_seed)};
  const std::size_t directions = cfg.n_scenes + cfg.n_scenes * cfg.shots_per_scene;
  for (std::size_t i = 0; i < directions; ++i) extend_basis(basis, cfg.d_v, rng);
  const auto& d = basis[0];
  const auto scene_dir = [&](std::size_t s) -> const FeatureVector& { return basis[1 + s]; };
  const auto shot_dir = [&](std::size_t s, std::size_t k) -> const FeatureVector& {
    return basis[1 + cfg.n_scenes + s * cfg.shots_per_scene + k];
  };
  const auto m = text_map(cfg);

  const std::size_t n = cfg.n_frames();
  std::vector<std::size_t> unpaired(n);
  std::iota(unpaired.begin(), unpaired.end(), std::size_t{0});
  std::shuffle(unpaired.begin(), unpaired.end(), rng);
  const auto n_paired = static_cast<std::size_t>(std::lround(cfg.pair_rate * static_cast<double>(n)));
  std::vector<bool> paired(n, false);
  for (std::size_t i = 0; i < n_paired; ++i) paired[unpaired[i]] = true;

  std::vector<std::int64_t> frame_ids(n);
  std::iota(frame_ids.begin(), frame_ids.end(), std::int64_t{1});
  std::shuffle(frame_ids.begin(), frame_ids.end(), rng);

  GeneratedClip out;
  out.clip.clip_id = clip_id;
  out.clip.movie_id = movie_id;
  const double scene_radius = cfg.scene_sep / std::sqrt(2.0);
  std::size_t g = 0;
  for (std::size_t s = 0; s < cfg.n_scenes; ++s) {
    Scene scene{static_cast<std::int64_t>(s), {}};
    for (std::size_t k = 0; k < cfg.shots_per_scene; ++k) {
      const auto shot_id = static_cast<std::int64_t>(s * cfg.shots_per_scene + k);
      Shot shot{shot_id, {}};
      for (std::size_t f = 0; f < cfg.frames_per_shot; ++f, ++g) {
        FrameRecord rec;
        rec.frame_id = frame_ids[g];
        rec.vision_feat.resize(cfg.d_v);
        for (std::size_t i = 0; i < cfg.d_v; ++i) {
          rec.vision_feat[i] = scene_radius * scene_dir(s)[i] + cfg.shot_sep * shot_dir(s, k)[i] +
                               cfg.drift * static_cast<double>(g) * d[i];
        }
        for (double& x : rec.vision_feat) x += cfg.noise * normal(rng);
        rec.text_feat.assign(cfg.d_u, 0.0);
        if (paired[g]) {
          for (std::size_t r = 0; r < cfg.d_u; ++r) {
            double acc = 0.0;
            for (std::size_t c = 0; c < cfg.d_v; ++c) acc += m[r * cfg.d_v + c] * rec.vision_feat[c];
            rec.text_feat[r] = cfg.text_scale * acc;
          }
        }
        rec.start_ms = static_cast<std::int64_t>(g) * 2500 + 1000;
        rec.end_ms = rec.start_ms + 1800;
        rec.shot_id = shot_id;
        rec.scene_id = static_cast<std::int64_t>(s);
        rec.gt_index = static_cast<int>(g + 1);
        shot.frame_positions.push_back(g);
        out.clip.frames.push_back(std::move(rec));
      }
      scene.shots.push_back(std::move(shot));
    }
    out.hierarchy.scenes.push_back(std::move(scene));
  }
  return out;
}

ClipPuzzle shuffle_clip(const ClipPuzzle& clip, std::uint64_t seed) {
  std::vector<std::size_t> order(clip.n_frames());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  ClipPuzzle out{clip.clip_id, clip.movie_id, {}};
  out.frames.reserve(order.size());
  for (std::size_t i : order) out.frames.push_back(clip.frames[i]);
  return out;
}

std::vector<GenConfig> default_shapes(const GenConfig& base) {
  constexpr std::size_t kShapes[][3] = {{2, 3, 3}, {1, 4, 3}, {2, 2, 4}, {1, 5, 2}, {2, 4, 2}, {2, 5, 2}};
  std::vector<GenConfig> out;
  for (const auto& s : kShapes) {
    GenConfig c = base;
    c.n_scenes = s[0];
    c.shots_per_scene = s[1];
    c.frames_per_shot = s[2];
    out.push_back(c);
  }
  return out;
}

std::vector<ClipPuzzle> generate_clips(const DatasetConfig& cfg) {
  if (cfg.shapes.empty()) throw std::invalid_argument("dataset needs at least one clip shape");
  if (cfg.clips_per_movie == 0) throw std::invalid_argument("clips_per_movie must be >= 1");
  for (const auto& s : cfg.shapes) s.validate();
  std::vector<ClipPuzzle> clips;
  clips.reserve(cfg.n_clips);
  char movie[32], clip[32];
  for (std::size_t i = 0; i < cfg.n_clips; ++i) {
    GenConfig c = cfg.shapes[i % cfg.shapes.size()];
    c.seed = derive_seed(cfg.seed, "clip", i);
    const std::size_t mv = i / cfg.clips_per_movie;
    std::snprintf(movie, sizeof movie, "movie_%04zu", mv);
    std::snprintf(clip, sizeof clip, "m%04zu_c%03zu", mv, i % cfg.clips_per_movie);
    auto gen = generate_clip(c, clip, movie);
    clips.push_back(shuffle_clip(gen.clip, derive_seed(cfg.seed, "shuffle", i)));
  }
  return clips;
}

DatasetSplits generate_dataset(const DatasetConfig& cfg) {
  cfg.ratios.validate();
  const auto clips = generate_clips(cfg);
  return split_dataset(clips, cfg.ratios, derive_seed(cfg.seed, "split"));
}

std::string dataset_manifest_json(const DatasetConfig& cfg) {
  nlohmann::json shapes = nlohmann::json::array();
  for (const auto& s : cfg.shapes) {
    shapes.push_back({{"n_scenes", s.n_scenes},
                      {"shots_per_scene", s.shots_per_scene},
                      {"frames_per_shot", s.frames_per_shot},
                      {"d_v", s.d_v},
                      {"d_u", s.d_u},
                      {"scene_sep", s.scene_sep},
                      {"shot_sep", s.shot_sep},
                      {"drift", s.drift},
                      {"noise", s.noise},
                      {"pair_rate", s.pair_rate},
                      {"text_scale", s.text_scale},
                      {"world_seed", s.world_seed}});
  }
  nlohmann::json j{{"n_clips", cfg.n_clips},
                   {"clips_per_movie", cfg.clips_per_movie},
                   {"seed", cfg.seed},
                   {"ratios",
                    {{"train", cfg.ratios.train},
                     {"val", cfg.ratios.val},
                     {"test_in", cfg.ratios.test_in},
                     {"test_out", cfg.ratios.test_out}}},
                   {"shapes", shapes}};
  return j.dump(2);
}

}  // namespace hcmc
