#include "hcmc/clip_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hcmc/errors.hpp"

namespace hcmc {

namespace {

using nlohmann::json;

json frame_to_json(const FrameRecord& f) {
  return json{{"frame_id", f.frame_id}, {"vision_feat", f.vision_feat}, {"text_feat", f.text_feat},
              {"start_ms", f.start_ms}, {"end_ms", f.end_ms},           {"shot_id", f.shot_id},
              {"scene_id", f.scene_id}, {"gt_index", f.gt_index}};
}

FrameRecord frame_from_json(const json& j) {
  FrameRecord f;
  j.at("frame_id").get_to(f.frame_id);
  j.at("vision_feat").get_to(f.vision_feat);
  j.at("text_feat").get_to(f.text_feat);
  j.at("start_ms").get_to(f.start_ms);
  j.at("end_ms").get_to(f.end_ms);
  j.at("shot_id").get_to(f.shot_id);
  j.at("scene_id").get_to(f.scene_id);
  j.at("gt_index").get_to(f.gt_index);
  return f;
}

}  // namespace

std::string clip_to_json(const ClipPuzzle& clip) {
  json frames = json::array();
  for (const auto& f : clip.frames) frames.push_back(frame_to_json(f));
  json j{{"clip_id", clip.clip_id}, {"movie_id", clip.movie_id}, {"frames", std::move(frames)}};
  return j.dump();
}

ClipPuzzle clip_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    ClipPuzzle clip;
    j.at("clip_id").get_to(clip.clip_id);
    j.at("movie_id").get_to(clip.movie_id);
    for (const auto& f : j.at("frames")) clip.frames.push_back(frame_from_json(f));
    return clip;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed clip record: ") + e.what());
  }
}

std::vector<ClipPuzzle> read_clips_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::vector<ClipPuzzle> clips;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      clips.push_back(clip_from_json(line));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return clips;
}

void write_clips_jsonl(const std::filesystem::path& path, std::span<const ClipPuzzle> clips) {
  std::string out;
  for (const auto& clip : clips) {
    out += clip_to_json(clip);
    out += '\n';
  }
  write_text_file(path, out);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError(path, "write failed");
}

}  // namespace hcmc
