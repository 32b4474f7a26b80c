#include "hcmc/reorder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "hcmc/errors.hpp"

namespace hcmc {

ScoreMatrix::ScoreMatrix(std::size_t n) : n_(n), w_(n * n, 0.0) {
  if (n == 0) throw std::invalid_argument("score matrix needs at least one item");
}

void ScoreMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) throw std::out_of_range("score matrix index out of range");
  if (i == j) throw std::invalid_argument("score matrix diagonal is fixed at 0");
  if (!(value > -1.0 && value < 1.0)) throw std::invalid_argument("score matrix entry outside (-1, 1)");
  w_[i * n_ + j] = value;
}

double order_confidence(const Logits& logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m);
  const double e1 = std::exp(logits[1] - m);
  constexpr double kBound = 1.0 - 0x1p-53;
  return std::clamp((e1 - e0) / (e1 + e0), -kBound, kBound);
}

ScoreMatrix score_matrix(std::size_t n, const PairLogits& pair_logits) {
  ScoreMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const Logits l = pair_logits(i, j);
      if (!std::isfinite(l[0]) || !std::isfinite(l[1])) throw NumericalError("non-finite logits in score matrix");
      s.set(i, j, order_confidence(l));
    }
  }
  return s;
}

ScoreMatrix score_matrix(std::span<const FeatureVector> items, const ModelParams& params, Level level) {
  return score_matrix(items.size(),
                      [&](std::size_t i, std::size_t j) { return phi_forward(params, level, items[i], items[j]); });
}

double path_weight(const ScoreMatrix& s, std::span<const std::size_t> order) {
  double w = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) w += s(order[k - 1], order[k]);
  return w;
}

namespace {

struct Beam {
  std::vector<std::size_t> path;
  std::vector<bool> used;
  double weight = 0.0;
};

// Higher weight first; equal weights resolve to the lexicographically smaller path.
bool better(const Beam& a, const Beam& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.path < b.path;
}

bool better(const PathResult& a, const PathResult& b) {
  if (a.weight != b.weight) return a.weight > b.weight;
  return a.order.mapping() < b.order.mapping();
}

}  // namespace

PathResult beam_search(const ScoreMatrix& s, std::size_t bsize) {
  if (bsize == 0) throw std::invalid_argument("beam width must be >= 1");
  const std::size_t n = s.size();
  std::optional<PathResult> best;
  for (std::size_t begin = 0; begin < n; ++begin) {
    Beam root{{begin}, std::vector<bool>(n, false), 0.0};
    root.used[begin] = true;
    std::vector<Beam> beams{std::move(root)};
    for (std::size_t len = 1; len < n; ++len) {
      std::vector<Beam> grown;
      grown.reserve(beams.size() * (n - len));
      for (const auto& beam : beams) {
        for (std::size_t next = 0; next < n; ++next) {
          if (beam.used[next]) continue;
          Beam b = beam;
          b.weight += s(b.path.back(), next);
          b.path.push_back(next);
          b.used[next] = true;
          grown.push_back(std::move(b));
        }
      }
      const std::size_t keep = std::min(bsize, grown.size());
      std::partial_sort(grown.begin(), grown.begin() + static_cast<std::ptrdiff_t>(keep), grown.end(),
                        [](const Beam& a, const Beam& b) { return better(a, b); });
      grown.resize(keep);
      beams = std::move(grown);
    }
    PathResult candidate{Permutation(beams.front().path), beams.front().weight};
    if (!best || better(candidate, *best)) best = std::move(candidate);
  }
  return *best;
}

PathResult exact_max_path(const ScoreMatrix& s) {
  const std::size_t n = s.size();
  if (n > kExactPathMaxItems) {
    throw std::invalid_argument("exact_max_path limited to n <= " + std::to_string(kExactPathMaxItems));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> best_order = order;
  double best_weight = path_weight(s, order);
  // next_permutation walks orders lexicographically, so keeping strict
  // improvements only yields the smallest order among ties.
  while (std::next_permutation(order.begin(), order.end())) {
    const double w = path_weight(s, order);
    if (w > best_weight) {
      best_weight = w;
      best_order = order;
    }
  }
  return {Permutation(std::move(best_order)), best_weight};
}

std::string score_matrix_csv(const ScoreMatrix& s) {
  std::string out = "i,j,weight\n";
  char line[96];
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (i == j) continue;
      std::snprintf(line, sizeof line, "%zu,%zu,%.17g\n", i, j, s(i, j));
      out += line;
    }
  }
  return out;
}

}  // namespace hcmc
