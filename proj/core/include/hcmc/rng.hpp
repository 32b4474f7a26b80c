#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace hcmc {

using Rng = std::mt19937_64;

/// Stable seed for a named sub-stream: hash of (seed, purpose, index).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose, std::uint64_t index = 0);

/// FNV-1a 64-bit digest, used for artifact fingerprints.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace hcmc
