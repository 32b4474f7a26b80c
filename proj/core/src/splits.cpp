#include "hcmc/splits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "hcmc/rng.hpp"

namespace hcmc {

void SplitRatios::validate() const {
  for (double r : {train, val, test_in, test_out}) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("split ratios must lie in [0, 1]");
  }
  if (std::abs(train + val + test_in + test_out - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }
}

std::vector<ClipPuzzle>& DatasetSplits::by_name(std::string_view name) {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test_in") return test_in;
  if (name == "test_out") return test_out;
  throw std::invalid_argument("unknown split '" + std::string(name) + "'");
}

const std::vector<ClipPuzzle>& DatasetSplits::by_name(std::string_view name) const {
  return const_cast<DatasetSplits*>(this)->by_name(name);
}

DatasetSplits split_dataset(std::span<const ClipPuzzle> clips, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  const auto n = static_cast<double>(clips.size());

  std::map<std::string, std::vector<std::size_t>> by_movie;
  for (std::size_t i = 0; i < clips.size(); ++i) by_movie[clips[i].movie_id].push_back(i);

  std::set<std::string> out_movies;
  const auto out_target = static_cast<long>(std::lround(ratios.test_out * n));
  if (out_target > 0) {
    if (by_movie.size() < 2) throw std::invalid_argument("out-of-domain split needs at least two movies");
    std::vector<std::string> movies;
    for (const auto& [id, _] : by_movie) movies.push_back(id);
    Rng rng(derive_seed(seed, "split.movies"));
    std::shuffle(movies.begin(), movies.end(), rng);
    long taken = 0;
    for (const auto& id : movies) {
      if (out_movies.size() + 1 == by_movie.size()) break;  // keep one in-domain movie
      const auto size = static_cast<long>(by_movie[id].size());
      if (std::abs(taken + size - out_target) < std::abs(taken - out_target)) {
        out_movies.insert(id);
        taken += size;
      }
    }
  }

  DatasetSplits out;
  std::vector<const std::vector<std::size_t>*> in_movies;
  std::size_t m = 0;
  for (const auto& [id, members] : by_movie) {
    if (out_movies.contains(id)) {
      for (std::size_t i : members) out.test_out.push_back(clips[i]);
    } else {
      in_movies.push_back(&members);
      m += members.size();
    }
  }

  const auto n_val = std::min<std::size_t>(m, static_cast<std::size_t>(std::lround(ratios.val * n)));
  const auto n_test = std::min<std::size_t>(m - n_val, static_cast<std::size_t>(std::lround(ratios.test_in * n)));
  const std::size_t held = n_val + n_test;

  // Held-out quota per movie by largest remainder, earlier movies first on ties.
  std::vector<std::size_t> quota(in_movies.size());
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder numerator, movie)
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < in_movies.size(); ++k) {
    const std::size_t scaled = in_movies[k]->size() * held;
    quota[k] = scaled / m;
    assigned += quota[k];
    remainders.emplace_back(scaled % m, k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < held; ++r, ++assigned) ++quota[remainders[r].second];

  std::size_t j = 0;  // running index over all held-out clips, alternates val and test_in
  for (std::size_t k = 0; k < in_movies.size(); ++k) {
    const auto& members = *in_movies[k];
    const std::size_t size = members.size();
    std::vector<int> role(size, 0);  // 0 train, 1 val, 2 test_in
    for (std::size_t q = 0; q < quota[k]; ++q, ++j) {
      const bool to_val = (j + 1) * n_val / held > j * n_val / held;
      role[(2 * q + 1) * size / (2 * quota[k])] = to_val ? 1 : 2;
    }
    for (std::size_t c = 0; c < size; ++c) {
      (role[c] == 0 ? out.train : role[c] == 1 ? out.val : out.test_in).push_back(clips[members[c]]);
    }
  }
  return out;
}

}  // namespace hcmc
