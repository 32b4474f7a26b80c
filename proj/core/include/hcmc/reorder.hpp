#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hcmc/model.hpp"
#include "hcmc/types.hpp"

namespace hcmc {

/// n x n weights; entry (i, j) is the confidence that item i directly precedes item j.
/// The diagonal is fixed at 0.
class ScoreMatrix {
 public:
  explicit ScoreMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  /// Throws std::invalid_argument for i == j or a value outside (-1, 1).
  void set(std::size_t i, std::size_t j, double value);

 private:
  std::size_t n_;
  std::vector<double> w_;
};

/// (exp l1 - exp l0) / (exp l1 + exp l0), evaluated with a max shift and kept
/// strictly inside (-1, 1). Equal to tanh((l1 - l0) / 2).
double order_confidence(const Logits& logits);

using PairLogits = std::function<Logits(std::size_t i, std::size_t j)>;

/// Fills every ordered pair i != j from `pair_logits(i, j)`.
/// Throws NumericalError on non-finite logits.
ScoreMatrix score_matrix(std::size_t n, const PairLogits& pair_logits);

/// Score matrix from the phi head of `level` over item representations.
ScoreMatrix score_matrix(std::span<const FeatureVector> items, const ModelParams& params, Level level);

struct PathResult {
  Permutation order;
  double weight = 0.0;  // sum of consecutive edge weights, 0 for a single item
};

double path_weight(const ScoreMatrix& s, std::span<const std::size_t> order);

/// From every start node, grows paths one node at a time keeping the top
/// `bsize` partial paths; returns the best complete path. Ties are broken by
/// the lexicographically smallest order.
PathResult beam_search(const ScoreMatrix& s, std::size_t bsize);

inline constexpr std::size_t kExactPathMaxItems = 10;

/// Exhaustive maximum-weight Hamiltonian path, same tie-break. n <= 10.
PathResult exact_max_path(const ScoreMatrix& s);

/// "i,j,weight" rows (off-diagonal), with header.
std::string score_matrix_csv(const ScoreMatrix& s);

}  // namespace hcmc
