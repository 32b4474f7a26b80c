#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hcmc/metrics.hpp"

namespace hcmc {

// Hungarian method with potentials (O(k^3)) on the padded square cost matrix
// cost = -weight. Dummy rows/columns cost 0 and mark unmatched clusters.
std::vector<long> max_weight_assignment(const std::vector<std::vector<double>>& weights) {
  const std::size_t rows = weights.size();
  if (rows == 0) return {};
  const std::size_t cols = weights.front().size();
  for (const auto& r : weights) {
    if (r.size() != cols) throw std::invalid_argument("assignment: ragged weight matrix");
  }
  const std::size_t k = std::max(rows, cols);
  auto cost = [&](std::size_t i, std::size_t j) -> double {
    if (i >= rows || j >= cols) return 0.0;
    return -weights[i][j];
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based arrays; index 0 is the virtual source.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<std::size_t> owner(k + 1, 0), way(k + 1, 0);
  for (std::size_t i = 1; i <= k; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(k + 1, kInf);
    std::vector<bool> used(k + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<long> result(rows, -1);
  for (std::size_t j = 1; j <= k; ++j) {
    const std::size_t i = owner[j];
    if (i >= 1 && i <= rows && j <= cols) result[i - 1] = static_cast<long>(j - 1);
  }
  return result;
}

}  // namespace hcmc
