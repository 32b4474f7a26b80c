#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hcmc/errors.hpp"
#include "hcmc/reorder.hpp"

using namespace hcmc;

namespace {

ScoreMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> w(-0.99, 0.99);
  ScoreMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) m.set(i, j, w(rng));
    }
  }
  return m;
}

std::size_t factorial(std::size_t n) { return n <= 1 ? 1 : n * factorial(n - 1); }

}  // namespace

TEST(OrderConfidence, EqualsHalfTanhOfLogitGap) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d(0.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const Logits l{d(rng), d(rng)};
    EXPECT_NEAR(order_confidence(l), std::tanh((l[1] - l[0]) / 2.0), 1e-12);
  }
}

TEST(OrderConfidence, StaysStrictlyInsideUnitInterval) {
  EXPECT_LT(order_confidence({0.0, 1e6}), 1.0);
  EXPECT_GT(order_confidence({1e6, 0.0}), -1.0);
  EXPECT_DOUBLE_EQ(order_confidence({3.0, 3.0}), 0.0);
  EXPECT_NO_THROW(score_matrix(2, [](std::size_t, std::size_t) { return Logits{0.0, 900.0}; }));
}

TEST(ScoreMatrix, RejectsInvalidEntries) {
  ScoreMatrix m(3);
  EXPECT_THROW(m.set(1, 1, 0.5), std::invalid_argument);
  EXPECT_THROW(m.set(0, 1, 1.0), std::invalid_argument);
  EXPECT_THROW(m.set(0, 3, 0.1), std::out_of_range);
  EXPECT_THROW(ScoreMatrix(0), std::invalid_argument);
  EXPECT_THROW(score_matrix(2, [](std::size_t, std::size_t) { return Logits{0.0, std::nan("")}; }), NumericalError);
}

TEST(ScoreMatrix, CsvListsOffDiagonalEntries) {
  ScoreMatrix m(2);
  m.set(0, 1, 0.5);
  m.set(1, 0, -0.25);
  EXPECT_EQ(score_matrix_csv(m), "i,j,weight\n0,1,0.5\n1,0,-0.25\n");
}

TEST(BeamSearch, FullWidthMatchesExhaustiveSearch) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 7;
    const auto m = random_matrix(n, rng);
    const auto beam = beam_search(m, std::max<std::size_t>(1, factorial(n - 1)));
    const auto exact = exact_max_path(m);
    EXPECT_NEAR(beam.weight, exact.weight, 1e-12);
    EXPECT_EQ(beam.order, exact.order);
    EXPECT_NEAR(path_weight(m, beam.order.mapping()), beam.weight, 1e-12);
  }
}

TEST(BeamSearch, NarrowBeamNeverBeatsExact) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(8, rng);
    const double exact = exact_max_path(m).weight;
    for (std::size_t b : {1u, 2u, 8u, 64u}) {
      const double w = beam_search(m, b).weight;
      EXPECT_LE(w, exact + 1e-12);
    }
    EXPECT_NEAR(beam_search(m, factorial(7)).weight, exact, 1e-12);
  }
}

TEST(BeamSearch, WidthOneIsGreedyFromEachStart) {
  std::mt19937_64 rng(4);
  const std::size_t n = 6;
  const auto m = random_matrix(n, rng);
  double best = -1e9;
  for (std::size_t start = 0; start < n; ++start) {
    std::vector<std::size_t> path{start};
    std::vector<bool> used(n, false);
    used[start] = true;
    while (path.size() < n) {
      std::size_t pick = n;
      for (std::size_t j = 0; j < n; ++j) {
        if (!used[j] && (pick == n || m(path.back(), j) > m(path.back(), pick))) pick = j;
      }
      used[pick] = true;
      path.push_back(pick);
    }
    best = std::max(best, path_weight(m, path));
  }
  EXPECT_DOUBLE_EQ(beam_search(m, 1).weight, best);
}

TEST(BeamSearch, TiesResolveToSmallestOrder) {
  const ScoreMatrix flat(4);
  EXPECT_EQ(beam_search(flat, 3).order, Permutation::identity(4));
  EXPECT_EQ(exact_max_path(flat).order, Permutation::identity(4));
}

TEST(BeamSearch, RecoversChainOrder) {
  // A consistent tournament: forward edges positive, backward edges negative.
  const std::vector<std::size_t> truth{3, 0, 4, 1, 2};
  ScoreMatrix m(5);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      if (a != b) m.set(truth[a], truth[b], a < b ? 0.8 : -0.8);
    }
  }
  EXPECT_EQ(beam_search(m, 4).order, Permutation(truth));
}

TEST(BeamSearch, SingleItemAndBadWidth) {
  const auto r = beam_search(ScoreMatrix(1), 8);
  EXPECT_EQ(r.order, Permutation::identity(1));
  EXPECT_EQ(r.weight, 0.0);
  EXPECT_THROW(beam_search(ScoreMatrix(3), 0), std::invalid_argument);
}

TEST(ExactMaxPath, RejectsLargeInputs) {
  EXPECT_THROW(exact_max_path(ScoreMatrix(kExactPathMaxItems + 1)), std::invalid_argument);
}
