#include "manifest.hpp"

#include <cstdio>

#include "hcmc/clip_io.hpp"
#include "hcmc/rng.hpp"

namespace hcmc::cli {

std::string file_digest(const std::filesystem::path& path) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(read_text_file(path))));
  return buf;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  auto files = [](const std::vector<std::filesystem::path>& paths) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : paths) {
      nlohmann::json entry{{"path", p.string()}};
      if (std::filesystem::is_regular_file(p)) entry["fnv1a64"] = file_digest(p);
      arr.push_back(entry);
    }
    return arr;
  };
  return {{"command", m.command},    {"args", m.args},          {"config", m.config},
          {"seed", m.seed},          {"inputs", files(m.inputs)}, {"outputs", files(m.outputs)},
          {"wall_time_s", m.wall_time_s}};
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  write_text_file(path, manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace hcmc::cli
