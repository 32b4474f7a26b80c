#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "hcmc/splits.hpp"
#include "hcmc/types.hpp"

namespace hcmc {

/// Shape and difficulty of synthetic clips.
///
/// Frame vision features are shot center + drift * (global index) * d + noise,
/// where d is a unit direction shared by every clip generated from the same
/// world_seed and scene/shot centers lie on per-clip directions orthogonal to d.
/// Text features are text_scale * M v for a fixed random map M (also from
/// world_seed), zeroed on unpaired frames.
struct GenConfig {
  std::size_t n_scenes = 2;
  std::size_t shots_per_scene = 3;
  std::size_t frames_per_shot = 3;
  std::size_t d_v = 32;
  std::size_t d_u = 16;
  double scene_sep = 10.0;
  double shot_sep = 4.0;
  double drift = 0.5;
  double noise = 0.25;
  double pair_rate = 0.835;
  double text_scale = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t world_seed = 0;

  std::size_t n_frames() const { return n_scenes * shots_per_scene * frames_per_shot; }
  /// Throws std::invalid_argument on a bad value or too few dimensions for
  /// mutually orthogonal centers.
  void validate() const;
};

struct GeneratedClip {
  ClipPuzzle clip;  // frames in temporal order
  Hierarchy hierarchy;
};

/// The unit temporal direction used by every clip of `world_seed`.
FeatureVector drift_direction(std::size_t d_v, std::uint64_t world_seed);

GeneratedClip generate_clip(const GenConfig& cfg, const std::string& clip_id = "clip",
                            const std::string& movie_id = "movie");

/// Uniformly random presentation order; labels and features untouched.
ClipPuzzle shuffle_clip(const ClipPuzzle& clip, std::uint64_t seed);

struct DatasetConfig {
  /// Clip shapes cycled over; each keeps the difficulty settings of `base`.
  std::vector<GenConfig> shapes;
  std::size_t n_clips = 100;
  std::size_t clips_per_movie = 10;
  SplitRatios ratios;
  std::uint64_t seed = 0;
};

/// Shapes (scenes x shots x frames): 2x3x3, 1x4x3, 2x2x4, 1x5x2, 2x4x2, 2x5x2.
std::vector<GenConfig> default_shapes(const GenConfig& base);

/// Shuffled clips from every shape, assigned to synthetic movies, then split.
/// Clip i uses seed derive_seed(seed, "clip", i) and shape i mod |shapes|.
std::vector<ClipPuzzle> generate_clips(const DatasetConfig& cfg);
DatasetSplits generate_dataset(const DatasetConfig& cfg);

/// JSON record of the generator settings for provenance.
std::string dataset_manifest_json(const DatasetConfig& cfg);

}  // namespace hcmc
