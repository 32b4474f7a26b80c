#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hcmc/types.hpp"

namespace hcmc {

/// One JSON object without a trailing newline:
/// {clip_id, movie_id, frames:[{frame_id, vision_feat, text_feat, start_ms, end_ms, shot_id, scene_id, gt_index}]}
std::string clip_to_json(const ClipPuzzle& clip);
ClipPuzzle clip_from_json(std::string_view line);

/// Blank lines are skipped. Throws IoError on open failure, std::invalid_argument on a bad line.
std::vector<ClipPuzzle> read_clips_jsonl(const std::filesystem::path& path);
void write_clips_jsonl(const std::filesystem::path& path, std::span<const ClipPuzzle> clips);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace hcmc
