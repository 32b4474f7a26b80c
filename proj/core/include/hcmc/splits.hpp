#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hcmc/types.hpp"

namespace hcmc {

inline constexpr std::array<std::string_view, 4> kSplitNames{"train", "val", "test_in", "test_out"};

/// Clip shares of train / val / in-domain test / out-of-domain test.
struct SplitRatios {
  double train = 0.70;
  double val = 0.06;
  double test_in = 0.12;
  double test_out = 0.12;

  /// Throws std::invalid_argument unless every share is in [0, 1] and they sum to 1.
  void validate() const;
};

struct DatasetSplits {
  std::vector<ClipPuzzle> train;
  std::vector<ClipPuzzle> val;
  std::vector<ClipPuzzle> test_in;
  std::vector<ClipPuzzle> test_out;

  std::vector<ClipPuzzle>& by_name(std::string_view name);
  const std::vector<ClipPuzzle>& by_name(std::string_view name) const;
};

/// Whole movies go to test_out (seeded greedy closest fit to its share); the
/// remaining movies get held-out quotas by largest remainder, and within each
/// movie those clips are picked at equally spaced ordinals and alternate
/// between val and test_in. The rest go to training. Clips of one movie keep
/// their input order. Throws when out-of-domain clips are requested but fewer
/// than two movies exist.
DatasetSplits split_dataset(std::span<const ClipPuzzle> clips, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace hcmc
