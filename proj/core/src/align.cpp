#include "hcmc/align.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hcmc/clip_io.hpp"
#include "hcmc/errors.hpp"
#include "hcmc/rng.hpp"
#include "hcmc/utterance.hpp"

namespace hcmc {

std::string_view align_status_name(AlignStatus status) {
  switch (status) {
    case AlignStatus::paired:
      return "paired";
    case AlignStatus::duplicate:
      return "duplicate";
    case AlignStatus::kept_gap:
      return "kept_gap";
    case AlignStatus::uncovered:
      return "uncovered";
  }
  return "unknown";
}

std::vector<AlignedFrame> align_frames(std::span<const RawFrame> frames, std::span<const SrtCue> cues,
                                       const AlignConfig& cfg) {
  std::vector<AlignedFrame> out;
  out.reserve(frames.size());
  std::vector<std::vector<std::size_t>> covered(cues.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (i > 0 && frames[i].timestamp_ms < frames[i - 1].timestamp_ms) {
      throw std::invalid_argument("align_frames: frame timestamps must be non-decreasing");
    }
    AlignedFrame a{frames[i], std::nullopt, AlignStatus::uncovered};
    for (std::size_t c = 0; c < cues.size(); ++c) {
      if (cues[c].start_ms <= frames[i].timestamp_ms && frames[i].timestamp_ms <= cues[c].end_ms) {
        a.cue = c;
        a.status = AlignStatus::duplicate;
        covered[c].push_back(i);
        break;
      }
    }
    out.push_back(std::move(a));
  }
  for (const auto& members : covered) {
    if (!members.empty()) out[members[(members.size() - 1) / 2]].status = AlignStatus::paired;
  }

  std::optional<std::int64_t> last_kept;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].paired()) {
      last_kept = out[i].frame.timestamp_ms;
      continue;
    }
    if (out[i].status != AlignStatus::uncovered || !last_kept) continue;
    std::optional<std::int64_t> next_paired;
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[j].paired()) {
        next_paired = out[j].frame.timestamp_ms;
        break;
      }
    }
    if (next_paired && *next_paired - *last_kept > cfg.keep_gap_ms) {
      out[i].status = AlignStatus::kept_gap;
      last_kept = out[i].frame.timestamp_ms;
    }
  }
  return out;
}

FeatureVector text_features(std::string_view utterance, std::size_t dim) {
  FeatureVector v(dim, 0.0);
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    const std::uint64_t h = fnv1a64(token);
    v[h % dim] += (h >> 63) != 0 ? -1.0 : 1.0;
    token.clear();
  };
  for (char ch : utterance) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      token += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

namespace {

ClipPuzzle make_clip(std::span<const AlignedFrame* const> window, std::span<const SrtCue> cues,
                     const std::string& clip_id, const std::string& movie_id, std::size_t d_u) {
  ClipPuzzle clip{clip_id, movie_id, {}};
  int g = 0;
  for (const AlignedFrame* a : window) {
    FrameRecord r;
    r.frame_id = a->frame.frame_id;
    r.vision_feat = a->frame.feature;
    if (a->paired()) {
      const auto& cue = cues[*a->cue];
      r.text_feat = text_features(cue.text, d_u);
      r.start_ms = cue.start_ms;
      r.end_ms = cue.end_ms;
    } else {
      r.text_feat.assign(d_u, 0.0);
      r.start_ms = r.end_ms = a->frame.timestamp_ms;
    }
    r.shot_id = a->frame.shot_id;
    r.scene_id = a->frame.scene_id;
    r.gt_index = ++g;
    clip.frames.push_back(std::move(r));
  }
  return clip;
}

}  // namespace

std::vector<ClipPuzzle> segment_clips(std::span<const AlignedFrame> aligned, std::span<const SrtCue> cues,
                                      const std::string& movie_id, const SegmentConfig& cfg) {
  if (cfg.min_frames == 0 || cfg.min_frames > cfg.max_frames) {
    throw std::invalid_argument("segment_clips: need 1 <= min_frames <= max_frames");
  }
  std::vector<const AlignedFrame*> kept;
  for (const auto& a : aligned) {
    if (a.kept()) kept.push_back(&a);
  }

  std::vector<ClipPuzzle> clips;
  std::size_t i = 0;
  char id[32];
  while (i < kept.size()) {
    // Longest stretch from i without a hard time gap, capped at max_frames.
    std::size_t reach = 1;
    while (i + reach < kept.size() && reach < cfg.max_frames &&
           kept[i + reach]->frame.timestamp_ms - kept[i + reach - 1]->frame.timestamp_ms <= cfg.max_gap_ms) {
      ++reach;
    }
    std::size_t chosen = 0;
    for (std::size_t len = reach; len >= cfg.min_frames; --len) {
      std::size_t paired = 0;
      for (std::size_t k = 0; k < len; ++k) paired += kept[i + k]->paired() ? 1 : 0;
      if (static_cast<double>(paired) > cfg.min_paired_fraction * static_cast<double>(len)) {
        chosen = len;
        break;
      }
    }
    if (chosen == 0) {
      ++i;
      continue;
    }
    std::snprintf(id, sizeof id, "_c%03zu", clips.size());
    clips.push_back(make_clip(std::span(kept).subspan(i, chosen), cues, movie_id + id, movie_id, cfg.d_u));
    i += chosen;
  }
  return clips;
}

std::vector<RawFrame> parse_frame_manifest(std::string_view csv, const std::filesystem::path& base_dir) {
  std::vector<RawFrame> frames;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  auto numbers = [](const std::string& text, std::size_t line_no) {
    FeatureVector v;
    std::istringstream ss(text);
    double x;
    while (ss >> x) v.push_back(x);
    if (!ss.eof()) throw std::invalid_argument("manifest line " + std::to_string(line_no) + ": bad feature value");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.starts_with("frame_id")) continue;
    std::vector<std::string> cols;
    std::istringstream row(line);
    std::string col;
    while (std::getline(row, col, ',')) cols.push_back(col);
    if (cols.size() != 5) {
      throw std::invalid_argument("manifest line " + std::to_string(line_no) + ": expected 5 columns");
    }
    RawFrame f;
    try {
      f.frame_id = std::stoll(cols[0]);
      f.timestamp_ms = std::stoll(cols[1]);
      f.shot_id = std::stoll(cols[3]);
      f.scene_id = std::stoll(cols[4]);
    } catch (const std::exception&) {
      throw std::invalid_argument("manifest line " + std::to_string(line_no) + ": bad integer field");
    }
    if (cols[2].starts_with("inline:")) {
      f.feature = numbers(cols[2].substr(7), line_no);
    } else {
      f.feature = numbers(read_text_file(base_dir / cols[2]), line_no);
    }
    if (f.feature.empty()) throw std::invalid_argument("manifest line " + std::to_string(line_no) + ": no features");
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<RawFrame> read_frame_manifest(const std::filesystem::path& path) {
  return parse_frame_manifest(read_text_file(path), path.parent_path());
}

void IngestStats::merge(const IngestStats& o) {
  cues += o.cues;
  cues_dropped += o.cues_dropped;
  frames += o.frames;
  paired += o.paired;
  duplicates += o.duplicates;
  kept_gap += o.kept_gap;
  uncovered += o.uncovered;
  clips += o.clips;
  clip_frames += o.clip_frames;
  clip_paired += o.clip_paired;
  for (const auto& [k, v] : o.scenes_per_clip) scenes_per_clip[k] += v;
  for (const auto& [k, v] : o.shots_per_clip) shots_per_clip[k] += v;
}

std::string IngestStats::to_json() const {
  auto hist = [](const std::map<std::size_t, std::size_t>& h) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  nlohmann::json j{{"cues", cues},
                   {"cues_dropped", cues_dropped},
                   {"frames", frames},
                   {"paired", paired},
                   {"duplicates", duplicates},
                   {"kept_gap", kept_gap},
                   {"uncovered", uncovered},
                   {"clips", clips},
                   {"clip_frames", clip_frames},
                   {"clip_paired_fraction",
                    clip_frames == 0 ? 0.0 : static_cast<double>(clip_paired) / static_cast<double>(clip_frames)},
                   {"scenes_per_clip", hist(scenes_per_clip)},
                   {"shots_per_clip", hist(shots_per_clip)}};
  return j.dump(2);
}

IngestResult ingest_movie(const std::string& movie_id, std::span<const SrtCue> cues, std::span<const RawFrame> frames,
                          const AlignConfig& align, const SegmentConfig& segment) {
  IngestResult res;
  res.stats.cues = cues.size();
  for (const auto& c : cues) {
    if (auto text = normalize_utterance(c.text)) {
      res.cues.push_back({c.index, c.start_ms, c.end_ms, std::move(*text)});
    } else {
      ++res.stats.cues_dropped;
    }
  }
  res.aligned = align_frames(frames, res.cues, align);
  res.clips = segment_clips(res.aligned, res.cues, movie_id, segment);

  auto& st = res.stats;
  st.frames = frames.size();
  for (const auto& a : res.aligned) {
    switch (a.status) {
      case AlignStatus::paired:
        ++st.paired;
        break;
      case AlignStatus::duplicate:
        ++st.duplicates;
        break;
      case AlignStatus::kept_gap:
        ++st.kept_gap;
        break;
      case AlignStatus::uncovered:
        ++st.uncovered;
        break;
    }
  }
  st.clips = res.clips.size();
  for (const auto& clip : res.clips) {
    st.clip_frames += clip.n_frames();
    for (const auto& f : clip.frames) st.clip_paired += f.paired() ? 1 : 0;
    const Hierarchy h = hierarchy_from_labels(clip);
    ++st.scenes_per_clip[h.n_scenes()];
    ++st.shots_per_clip[h.n_shots()];
  }
  return res;
}

}  // namespace hcmc
