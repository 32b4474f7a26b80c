#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcmc/srt.hpp"
#include "hcmc/types.hpp"

namespace hcmc {

/// A movie frame with precomputed visual features and boundary labels.
struct RawFrame {
  std::int64_t frame_id = 0;
  std::int64_t timestamp_ms = 0;
  FeatureVector feature;
  std::int64_t shot_id = 0;
  std::int64_t scene_id = 0;

  bool operator==(const RawFrame&) const = default;
};

enum class AlignStatus {
  paired,       // representative frame of its cue
  duplicate,    // covered by a cue whose representative is another frame
  kept_gap,     // no cue, retained to avoid a long gap
  uncovered,    // no cue, dropped
};

std::string_view align_status_name(AlignStatus status);

struct AlignedFrame {
  RawFrame frame;
  std::optional<std::size_t> cue;  // index into the cue list when covered
  AlignStatus status = AlignStatus::uncovered;

  bool paired() const { return status == AlignStatus::paired; }
  bool kept() const { return status == AlignStatus::paired || status == AlignStatus::kept_gap; }

  bool operator==(const AlignedFrame&) const = default;
};

struct AlignConfig {
  /// An uncovered frame is kept when the kept frames around it would
  /// otherwise be more than this far apart.
  std::int64_t keep_gap_ms = 5000;
};

/// A frame is covered by the first cue (in list order) with
/// start_ms <= timestamp <= end_ms. Of the frames covered by one cue the middle
/// one (earlier on ties) is paired and the rest are duplicates. Uncovered
/// frames are scanned in time order and kept while the distance from the last
/// kept frame to the next paired frame exceeds keep_gap_ms.
/// Throws std::invalid_argument if timestamps decrease.
std::vector<AlignedFrame> align_frames(std::span<const RawFrame> frames, std::span<const SrtCue> cues,
                                       const AlignConfig& cfg = {});

struct SegmentConfig {
  std::size_t min_frames = 10;
  std::size_t max_frames = 20;
  double min_paired_fraction = 0.8;  // strict lower bound
  /// Consecutive kept frames further apart than this never share a clip.
  std::int64_t max_gap_ms = 10000;
  std::size_t d_u = 16;  // text feature dimension
};

/// Signed hashed bag of lower-cased alphanumeric tokens, L2-normalized.
FeatureVector text_features(std::string_view utterance, std::size_t dim);

/// Greedy left-to-right over kept frames: at each start take the longest window
/// (up to max_frames) with at least min_frames frames and a paired fraction
/// above min_paired_fraction; otherwise advance one frame. Clips are in
/// temporal order with gt_index 1..N; ids are "<movie_id>_c<ordinal>".
std::vector<ClipPuzzle> segment_clips(std::span<const AlignedFrame> aligned, std::span<const SrtCue> cues,
                                      const std::string& movie_id, const SegmentConfig& cfg = {});

/// frame_id,timestamp_ms,feature_path,shot_id,scene_id. feature_path is a file
/// of whitespace-separated numbers (relative to the manifest) or "inline:v1 v2 ...".
std::vector<RawFrame> read_frame_manifest(const std::filesystem::path& path);
std::vector<RawFrame> parse_frame_manifest(std::string_view csv, const std::filesystem::path& base_dir);

struct IngestStats {
  std::size_t cues = 0;
  std::size_t cues_dropped = 0;  // removed by normalization
  std::size_t frames = 0;
  std::size_t paired = 0;
  std::size_t duplicates = 0;
  std::size_t kept_gap = 0;
  std::size_t uncovered = 0;
  std::size_t clips = 0;
  std::size_t clip_frames = 0;
  std::size_t clip_paired = 0;
  std::map<std::size_t, std::size_t> scenes_per_clip;  // histogram
  std::map<std::size_t, std::size_t> shots_per_clip;

  void merge(const IngestStats& other);
  std::string to_json() const;
};

struct IngestResult {
  std::vector<SrtCue> cues;  // normalized, dropped cues removed
  std::vector<AlignedFrame> aligned;
  std::vector<ClipPuzzle> clips;  // temporal order
  IngestStats stats;
};

/// Normalizes cues, aligns frames and segments one movie.
IngestResult ingest_movie(const std::string& movie_id, std::span<const SrtCue> cues, std::span<const RawFrame> frames,
                          const AlignConfig& align = {}, const SegmentConfig& segment = {});

}  // namespace hcmc
