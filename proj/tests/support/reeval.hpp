// Re-derives the null-consistency biases from the documented split contract
// (split s shuffles with derive_seed(derive_seed(seed, 1), s) and takes the
// first and second halves) with the scan-based oracle estimator.
#ifndef EVPLANE_TESTS_REEVAL_HPP
#define EVPLANE_TESTS_REEVAL_HPP

#include "bridge.hpp"
#include "oracles.hpp"

#include "evplane/common.hpp"

#include <numeric>

namespace reeval {

struct NullBias {
  int k = 0;
  std::vector<int> candidates;
  std::vector<double> bias;
};

inline NullBias null_bias(const evplane::MatrixXd& samples, std::vector<int> candidates,
                          int splits, std::uint64_t seed) {
  std::sort(candidates.begin(), candidates.end());
  const auto rows = bridge::rows_of(samples);
  const std::size_t half = rows.size() / 2;
  NullBias out{0, candidates, std::vector<double>(candidates.size(), 0.0)};
  const std::uint64_t root = evplane::derive_seed(seed, 1);
  for (int s = 0; s < splits; ++s) {
    std::vector<Eigen::Index> order(rows.size());
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(evplane::derive_seed(root, static_cast<std::uint64_t>(s)));
    std::shuffle(order.begin(), order.end(), rng);
    oracle::Mat a, b;
    for (std::size_t i = 0; i < half; ++i) a.push_back(rows[static_cast<std::size_t>(order[i])]);
    for (std::size_t i = half; i < 2 * half; ++i) b.push_back(rows[static_cast<std::size_t>(order[i])]);
    for (std::size_t j = 0; j < candidates.size(); ++j)
      out.bias[j] += oracle::knn_kl_from_scan(a, b, candidates[j]) / splits;
  }
  std::size_t best = 0;
  for (std::size_t j = 1; j < candidates.size(); ++j)
    if (std::abs(out.bias[j]) < std::abs(out.bias[best])) best = j;
  out.k = candidates[best];
  return out;
}

}  // namespace reeval

#endif  // EVPLANE_TESTS_REEVAL_HPP
