#include "hcmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace hcmc {

namespace {

void check_pair(const Permutation& gt, const Permutation& pred, int beta) {
  if (gt.size() != pred.size()) {
    throw std::invalid_argument("ordering score: permutations differ in length (" + std::to_string(gt.size()) +
                                " vs " + std::to_string(pred.size()) + ")");
  }
  if (beta < 2 || static_cast<std::size_t>(beta) > gt.size()) {
    throw std::invalid_argument("ordering score: beta must lie in [2, N], got beta=" + std::to_string(beta) +
                                " with N=" + std::to_string(gt.size()));
  }
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // result * (n - k + i) / i stays integral at every step.
    const std::uint64_t num = n - k + i;
    const std::uint64_t g = std::gcd(result, i);
    const std::uint64_t r = result / g;
    const std::uint64_t d = i / g;
    if (r > std::numeric_limits<std::uint64_t>::max() / num) throw std::overflow_error("binomial overflow");
    result = r * num / d;
  }
  return result;
}

OrderingResult ordering_score(const Permutation& gt, const Permutation& pred, int beta) {
  check_pair(gt, pred, beta);
  const std::size_t n = gt.size();
  const auto b = static_cast<std::size_t>(beta);
  const Permutation pred_pos = pred.inverse();

  // seq[p] = predicted position of the item at ground-truth position p.
  std::vector<std::size_t> seq(n);
  for (std::size_t p = 0; p < n; ++p) seq[p] = pred_pos[gt[p]];

  // ending[i][k]: increasing subsequences of length k+1 that end at i.
  std::vector<std::vector<std::uint64_t>> ending(n, std::vector<std::uint64_t>(b, 0));
  std::uint64_t matches = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ending[i][0] = 1;
    for (std::size_t j = 0; j < i; ++j) {
      if (seq[j] >= seq[i]) continue;
      for (std::size_t k = 1; k < b; ++k) ending[i][k] += ending[j][k - 1];
    }
    matches += ending[i][b - 1];
  }
  return {beta, matches, binomial(n, b)};
}

OrderingResult ordering_score_bruteforce(const Permutation& gt, const Permutation& pred, int beta) {
  check_pair(gt, pred, beta);
  const std::size_t n = gt.size();
  if (n > kBruteforceMaxItems) {
    throw std::invalid_argument("brute-force ordering score limited to N <= " + std::to_string(kBruteforceMaxItems));
  }
  const Permutation gt_pos = gt.inverse();
  const Permutation pred_pos = pred.inverse();

  std::uint64_t matches = 0;
  std::uint64_t total = 0;
  // Every item subset of size beta, as a bitmask over item ids.
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<int>(__builtin_popcount(mask)) != beta) continue;
    ++total;
    std::vector<std::size_t> items;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) items.push_back(i);
    }
    bool concordant = true;
    for (std::size_t x = 0; x < items.size() && concordant; ++x) {
      for (std::size_t y = x + 1; y < items.size(); ++y) {
        const bool gt_before = gt_pos[items[x]] < gt_pos[items[y]];
        const bool pred_before = pred_pos[items[x]] < pred_pos[items[y]];
        if (gt_before != pred_before) {
          concordant = false;
          break;
        }
      }
    }
    if (concordant) ++matches;
  }
  return {beta, matches, total};
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

ClusterEval cluster_iou(const Partition& pred, const Partition& gt, std::span<const FeatureVector> pred_centers,
                        std::span<const FeatureVector> features) {
  if (pred.empty() || gt.empty()) throw std::invalid_argument("cluster_iou: empty partition");
  if (pred_centers.size() != pred.size()) {
    throw std::invalid_argument("cluster_iou: one center per predicted cluster required");
  }
  auto covered = [](const Partition& part) {
    std::set<std::size_t> s;
    for (const auto& g : part) s.insert(g.begin(), g.end());
    return s;
  };
  if (covered(pred) != covered(gt)) throw std::invalid_argument("cluster_iou: partitions cover different positions");

  std::vector<FeatureVector> gt_means;
  gt_means.reserve(gt.size());
  for (const auto& group : gt) {
    if (group.empty()) throw std::invalid_argument("cluster_iou: empty ground-truth cluster");
    FeatureVector mean(features[group.front()].size(), 0.0);
    for (std::size_t p : group) {
      const auto& f = features[p];
      for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += f[d];
    }
    for (double& v : mean) v /= static_cast<double>(group.size());
    gt_means.push_back(std::move(mean));
  }

  std::vector<std::vector<double>> sim(pred.size(), std::vector<double>(gt.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) sim[i][j] = cosine_similarity(pred_centers[i], gt_means[j]);
  }
  const auto match = max_weight_assignment(sim);

  ClusterEval eval;
  double iou_sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (match[i] < 0) continue;
    const auto j = static_cast<std::size_t>(match[i]);
    std::set<std::size_t> a(pred[i].begin(), pred[i].end());
    std::set<std::size_t> b(gt[j].begin(), gt[j].end());
    std::size_t inter = 0;
    for (std::size_t p : a) inter += b.count(p);
    const std::size_t uni = a.size() + b.size() - inter;
    iou_sum += uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    eval.assignment.emplace_back(i, j);
  }
  eval.mean_iou = iou_sum / static_cast<double>(std::max(pred.size(), gt.size()));
  return eval;
}

}  // namespace hcmc
