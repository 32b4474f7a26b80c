#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hcmc/cluster.hpp"

using namespace hcmc;

namespace {

std::vector<FeatureVector> blobs(std::size_t k, std::size_t per, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, spread);
  std::vector<FeatureVector> pts;
  for (std::size_t i = 0; i < per; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      pts.push_back({10.0 * static_cast<double>(c) + d(rng), 5.0 * static_cast<double>(c % 2) + d(rng)});
    }
  }
  return pts;
}

}  // namespace

TEST(Distance, EuclideanAndCosine) {
  const std::vector<double> a{3, 4}, b{0, 0}, c{6, 8}, e{-4, 3};
  EXPECT_DOUBLE_EQ(distance(a, b, DistanceKind::euclidean), 5.0);
  EXPECT_NEAR(distance(a, c, DistanceKind::cosine), 0.0, 1e-15);
  EXPECT_NEAR(distance(a, e, DistanceKind::cosine), 1.0, 1e-15);
  EXPECT_THROW(distance(a, b, DistanceKind::cosine), std::invalid_argument);
  EXPECT_EQ(parse_distance(distance_name(DistanceKind::cosine)), DistanceKind::cosine);
  EXPECT_THROW(parse_distance("manhattan"), std::invalid_argument);
}

TEST(KMeans, RecoversSeparatedBlobs) {
  const auto pts = blobs(4, 10, 0.3, 1);
  ClusterConfig cfg;
  cfg.m = 4;
  const auto r = kmeans(pts, cfg);
  ASSERT_EQ(r.partition.size(), 4u);
  // Points were interleaved by blob, so position i belongs to blob i % 4.
  for (const auto& cluster : r.partition) {
    ASSERT_FALSE(cluster.empty());
    for (std::size_t p : cluster) EXPECT_EQ(p % 4, cluster.front() % 4);
  }
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.degenerate);
}

TEST(KMeans, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto pts = blobs(5, 12, 4.0, seed);
    for (auto kind : {DistanceKind::euclidean, DistanceKind::cosine}) {
      ClusterConfig cfg;
      cfg.m = 5;
      cfg.seed = seed;
      cfg.distance = kind;
      cfg.restarts = 1;
      cfg.init = seed % 2 ? InitMethod::uniform_random : InitMethod::kmeans_plus_plus;
      const auto r = kmeans(pts, cfg);
      for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
        EXPECT_LE(r.objective_trace[i], r.objective_trace[i - 1] + 1e-9) << "seed " << seed;
      }
    }
  }
}

TEST(KMeans, PartitionIsCanonical) {
  const auto pts = blobs(3, 7, 1.0, 4);
  ClusterConfig cfg;
  cfg.m = 3;
  const auto r = kmeans(pts, cfg);
  std::vector<bool> seen(pts.size(), false);
  std::size_t previous_first = 0;
  for (std::size_t c = 0; c < r.partition.size(); ++c) {
    const auto& cl = r.partition[c];
    EXPECT_TRUE(std::is_sorted(cl.begin(), cl.end()));
    if (c > 0) {
      EXPECT_GT(cl.front(), previous_first);
    }
    previous_first = cl.front();
    for (std::size_t p : cl) {
      EXPECT_FALSE(seen[p]);
      seen[p] = true;
    }
  }
  EXPECT_EQ(std::count(seen.begin(), seen.end(), true), static_cast<long>(pts.size()));
  EXPECT_EQ(r.centroids.size(), r.partition.size());
}

TEST(KMeans, DeterministicGivenSeed) {
  const auto pts = blobs(3, 9, 3.0, 8);
  ClusterConfig cfg;
  cfg.m = 3;
  cfg.seed = 99;
  const auto a = kmeans(pts, cfg);
  const auto b = kmeans(pts, cfg);
  EXPECT_EQ(a.partition, b.partition);
  EXPECT_EQ(a.centroids, b.centroids);
}

TEST(KMeans, EdgeCases) {
  const std::vector<FeatureVector> pts{{1, 1}, {1, 1}, {1, 1}};
  ClusterConfig cfg;
  cfg.m = 2;
  const auto r = kmeans(pts, cfg);
  EXPECT_TRUE(r.degenerate);

  cfg.m = 3;
  const std::vector<FeatureVector> three{{0, 0}, {5, 0}, {0, 5}};
  EXPECT_EQ(kmeans(three, cfg).partition, (Partition{{0}, {1}, {2}}));
  cfg.m = 1;
  EXPECT_EQ(kmeans(three, cfg).partition, (Partition{{0, 1, 2}}));

  cfg.m = 4;
  EXPECT_THROW(kmeans(three, cfg), std::invalid_argument);
  cfg.m = 0;
  EXPECT_THROW(kmeans(three, cfg), std::invalid_argument);
  cfg.m = 1;
  EXPECT_THROW(kmeans({}, cfg), std::invalid_argument);
  EXPECT_THROW(kmeans(std::vector<FeatureVector>{{1, 2}, {1}}, cfg), std::invalid_argument);
}

TEST(KMeans, CosineIgnoresScale) {
  std::vector<FeatureVector> pts;
  for (int i = 1; i <= 5; ++i) {
    pts.push_back({1.0 * i, 0.1});
    pts.push_back({0.1, 2.0 * i});
  }
  ClusterConfig cfg;
  cfg.m = 2;
  cfg.distance = DistanceKind::cosine;
  const auto r = kmeans(pts, cfg);
  for (const auto& cl : r.partition) {
    for (std::size_t p : cl) EXPECT_EQ(p % 2, cl.front() % 2);
  }
}
