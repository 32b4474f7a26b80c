#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hcmc/types.hpp"

namespace hcmc {

enum class DistanceKind { euclidean, cosine };
enum class InitMethod { kmeans_plus_plus, uniform_random };

std::string_view distance_name(DistanceKind kind);
DistanceKind parse_distance(std::string_view name);

struct ClusterConfig {
  std::size_t m = 1;             // number of clusters
  std::size_t max_steps = 1000;  // Lloyd iterations per restart
  DistanceKind distance = DistanceKind::euclidean;
  std::uint64_t seed = 0;
  bool reseed_empty = true;
  InitMethod init = InitMethod::kmeans_plus_plus;
  /// Independent restarts; the lowest final objective wins (ties: earliest).
  std::size_t restarts = 8;
};

struct KMeansResult {
  /// Clusters ordered by their smallest member position; members ascending.
  Partition partition;
  std::vector<FeatureVector> centroids;  // parallel to partition
  std::size_t iterations = 0;
  bool converged = false;
  /// Fewer distinct points than clusters, or empty clusters left in place.
  bool degenerate = false;
  /// Objective after each centroid update: sum of squared euclidean distances
  /// or sum of cosine distances.
  std::vector<double> objective_trace;
};

/// euclidean: |a - b|_2. cosine: 1 - a.b / (|a||b|); throws on a zero vector.
double distance(std::span<const double> a, std::span<const double> b, DistanceKind kind);

/// Lloyd's algorithm with k-means++ (or uniform) seeding.
/// Throws std::invalid_argument if points are empty, ragged, or m is outside [1, n].
KMeansResult kmeans(std::span<const FeatureVector> points, const ClusterConfig& config);

}  // namespace hcmc
