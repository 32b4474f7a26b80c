#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcmc/types.hpp"

namespace hcmc::testing {

/// A clip in temporal order with the given shot sizes per scene and 2-d features.
inline ClipPuzzle layered_clip(const std::vector<std::vector<int>>& shots_per_scene, const std::string& id = "c") {
  ClipPuzzle clip{id, "movie", {}};
  int g = 0;
  std::int64_t shot_id = 0;
  for (std::size_t s = 0; s < shots_per_scene.size(); ++s) {
    for (int size : shots_per_scene[s]) {
      for (int f = 0; f < size; ++f) {
        FrameRecord r;
        r.frame_id = 100 + g;
        r.vision_feat = {static_cast<double>(s) * 10.0, static_cast<double>(shot_id) * 3.0, 0.1 * g};
        r.text_feat = {1.0, static_cast<double>(g)};
        r.start_ms = 1000 * g;
        r.end_ms = 1000 * g + 500;
        r.shot_id = shot_id;
        r.scene_id = static_cast<std::int64_t>(s);
        r.gt_index = ++g;
        clip.frames.push_back(r);
      }
      ++shot_id;
    }
  }
  return clip;
}

}  // namespace hcmc::testing
