#include "hcmc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

#include "hcmc/rng.hpp"

namespace hcmc {

namespace {

constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Contribution of one point to the objective and to k-means++ weights.
double cost(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  return kind == DistanceKind::euclidean ? squared_euclidean(a, b) : distance(a, b, kind);
}

void normalize(FeatureVector& v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  if (n > 0.0) {
    for (double& x : v) x /= n;
  }
}

std::size_t count_distinct(std::span<const FeatureVector> points) {
  std::set<FeatureVector> distinct(points.begin(), points.end());
  return distinct.size();
}

std::vector<FeatureVector> seed_centroids(std::span<const FeatureVector> points, const ClusterConfig& cfg, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<std::size_t> chosen;
  if (cfg.init == InitMethod::uniform_random) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const auto j = std::uniform_int_distribution<std::size_t>(i, n - 1)(rng);
      std::swap(idx[i], idx[j]);
    }
    chosen.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(cfg.m));
  } else {
    chosen.push_back(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    std::vector<double> weight(n);
    while (chosen.size() < cfg.m) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c : chosen) best = std::min(best, cost(points[i], points[c], cfg.distance));
        weight[i] = best;
        total += best;
      }
      if (total > 0.0) {
        chosen.push_back(std::discrete_distribution<std::size_t>(weight.begin(), weight.end())(rng));
      } else {
        // Every point coincides with a chosen centroid: take the first unused index.
        for (std::size_t i = 0; i < n; ++i) {
          if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
            chosen.push_back(i);
            break;
          }
        }
      }
    }
  }
  std::vector<FeatureVector> centroids;
  for (std::size_t c : chosen) {
    centroids.push_back(points[c]);
    if (cfg.distance == DistanceKind::cosine) normalize(centroids.back());
  }
  return centroids;
}

KMeansResult lloyd(std::span<const FeatureVector> points, const ClusterConfig& cfg, Rng& rng) {
  const std::size_t n = points.size();
  const std::size_t dim = points.front().size();
  KMeansResult res;
  res.centroids = seed_centroids(points, cfg, rng);

  std::vector<double> norms(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) norms[i] = std::sqrt(squared_euclidean(points[i], FeatureVector(dim, 0.0)));

  std::vector<std::size_t> z(n, kUnassigned);
  for (std::size_t step = 1; step <= cfg.max_steps; ++step) {
    std::vector<std::size_t> next(n);
    std::vector<std::size_t> sizes(cfg.m, 0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < cfg.m; ++j) {
        const double d = cost(points[i], res.centroids[j], cfg.distance);
        if (d < best) {
          best = d;
          next[i] = j;
        }
      }
      ++sizes[next[i]];
    }

    if (cfg.reseed_empty) {
      for (std::size_t j = 0; j < cfg.m; ++j) {
        if (sizes[j] != 0) continue;
        std::size_t far = kUnassigned;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (sizes[next[i]] < 2) continue;
          const double d = cost(points[i], res.centroids[next[i]], cfg.distance);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        if (far == kUnassigned) break;
        --sizes[next[far]];
        next[far] = j;
        sizes[j] = 1;
        res.centroids[j] = points[far];
        if (cfg.distance == DistanceKind::cosine) normalize(res.centroids[j]);
      }
    }

    const bool changed = next != z;
    z = std::move(next);

    for (std::size_t j = 0; j < cfg.m; ++j) {
      if (sizes[j] == 0) continue;
      // Cosine centroids average unit directions, which minimizes the summed cosine distance.
      FeatureVector mean(dim, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (z[i] != j) continue;
        const double w = cfg.distance == DistanceKind::cosine ? 1.0 / norms[i] : 1.0;
        for (std::size_t d = 0; d < dim; ++d) mean[d] += w * points[i][d];
      }
      for (double& v : mean) v /= static_cast<double>(sizes[j]);
      if (cfg.distance == DistanceKind::cosine) {
        normalize(mean);
        if (std::all_of(mean.begin(), mean.end(), [](double v) { return v == 0.0; })) continue;
      }
      res.centroids[j] = std::move(mean);
    }

    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) objective += cost(points[i], res.centroids[z[i]], cfg.distance);
    res.objective_trace.push_back(objective);
    res.iterations = step;
    if (!changed) {
      res.converged = true;
      break;
    }
  }

  // Canonical cluster order: by smallest member position.
  std::vector<std::vector<std::size_t>> members(cfg.m);
  for (std::size_t i = 0; i < n; ++i) members[z[i]].push_back(i);
  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < cfg.m; ++j) {
    if (!members[j].empty()) order.push_back(j);
  }
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return members[a].front() < members[b].front(); });
  std::vector<FeatureVector> centroids;
  for (std::size_t j : order) {
    res.partition.push_back(members[j]);
    centroids.push_back(res.centroids[j]);
  }
  res.centroids = std::move(centroids);
  res.degenerate = res.partition.size() < cfg.m;
  return res;
}

}  // namespace

std::string_view distance_name(DistanceKind kind) {
  return kind == DistanceKind::euclidean ? "euclidean" : "cosine";
}

DistanceKind parse_distance(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "euclidean") return DistanceKind::euclidean;
  if (lower == "cosine") return DistanceKind::cosine;
  throw std::invalid_argument("unknown cluster distance '" + std::string(name) + "'");
}

double distance(std::span<const double> a, std::span<const double> b, DistanceKind kind) {
  if (a.size() != b.size()) throw std::invalid_argument("distance: dimension mismatch");
  if (kind == DistanceKind::euclidean) return std::sqrt(squared_euclidean(a, b));
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine distance undefined for a zero vector");
  const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  return std::max(0.0, 1.0 - cos);
}

KMeansResult kmeans(std::span<const FeatureVector> points, const ClusterConfig& config) {
  if (points.empty()) throw std::invalid_argument("kmeans: no points");
  const std::size_t dim = points.front().size();
  if (dim == 0) throw std::invalid_argument("kmeans: zero-dimensional points");
  for (const auto& p : points) {
    if (p.size() != dim) throw std::invalid_argument("kmeans: points differ in dimension");
    if (config.distance == DistanceKind::cosine &&
        std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; })) {
      throw std::invalid_argument("kmeans: cosine distance undefined for a zero vector");
    }
  }
  if (config.m == 0 || config.m > points.size()) {
    throw std::invalid_argument("kmeans: m=" + std::to_string(config.m) + " outside [1, " +
                                std::to_string(points.size()) + "]");
  }
  if (config.max_steps == 0) throw std::invalid_argument("kmeans: max_steps must be >= 1");

  const std::size_t restarts = std::max<std::size_t>(1, config.restarts);
  KMeansResult best;
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng(derive_seed(config.seed, "kmeans", r));
    auto res = lloyd(points, config, rng);
    if (r == 0 || res.objective_trace.back() < best.objective_trace.back()) best = std::move(res);
  }
  if (count_distinct(points) < config.m) best.degenerate = true;
  return best;
}

}  // namespace hcmc
