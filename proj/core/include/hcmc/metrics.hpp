#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hcmc/types.hpp"

namespace hcmc {

/// Generalized ordering score: the share of beta-item subsets that appear in
/// the same relative order under the ground truth and the prediction.
struct OrderingResult {
  int beta = 2;
  std::uint64_t matches = 0;
  std::uint64_t total = 1;  // C(N, beta)

  double score() const { return static_cast<double>(matches) / static_cast<double>(total); }
  bool operator==(const OrderingResult&) const = default;
};

/// C(n, k). Throws std::overflow_error if the result does not fit in 64 bits.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Counts length-beta increasing subsequences of pred-rank read in gt order.
/// O(N^2 * beta). Throws std::invalid_argument on size mismatch or beta outside [2, N].
OrderingResult ordering_score(const Permutation& gt, const Permutation& pred, int beta);

/// Enumerates every beta-subset of items; reference for ordering_score. N <= 12.
OrderingResult ordering_score_bruteforce(const Permutation& gt, const Permutation& pred, int beta);

inline constexpr std::size_t kBruteforceMaxItems = 12;

struct ClusterEval {
  double mean_iou = 0.0;
  /// (predicted cluster, ground-truth cluster) for every matched pair.
  std::vector<std::pair<std::size_t, std::size_t>> assignment;
};

/// Matches predicted centers to ground-truth cluster means by cosine similarity
/// (optimal one-to-one), then averages IoU over max(#pred, #gt) slots; unmatched
/// clusters count as zero. `features` is indexed by position.
ClusterEval cluster_iou(const Partition& pred, const Partition& gt, std::span<const FeatureVector> pred_centers,
                        std::span<const FeatureVector> features);

/// Maximum-weight one-to-one assignment of rows to columns. Result[row] is the
/// matched column or -1. Rectangular inputs are allowed.
std::vector<long> max_weight_assignment(const std::vector<std::vector<double>>& weights);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace hcmc
