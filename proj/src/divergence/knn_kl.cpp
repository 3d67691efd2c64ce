#include "evplane/divergence/knn_kl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evplane::divergence {

std::vector<double> knn_kl_multi(const MatrixXd& samples_p, const MatrixXd& samples_q,
                                 const std::vector<int>& ks, NeighborMethod method) {
  if (ks.empty()) throw DomainError("no k requested");
  if (samples_p.cols() != samples_q.cols())
    throw ShapeError("sample sets have dimensions " + std::to_string(samples_p.cols()) + " and " +
                     std::to_string(samples_q.cols()));
  if (samples_p.cols() < 1) throw ShapeError("samples have zero dimension");
  const int k_max = *std::max_element(ks.begin(), ks.end());
  const Eigen::Index n_p = samples_p.rows();
  const Eigen::Index n_q = samples_q.rows();
  if (*std::min_element(ks.begin(), ks.end()) < 1) throw DomainError("k must be at least 1");
  if (n_p <= k_max || n_q < k_max)
    throw SampleSizeError("need n_p > k and n_q >= k; got n_p = " + std::to_string(n_p) +
                          ", n_q = " + std::to_string(n_q) + ", k = " + std::to_string(k_max));

  const MatrixXd rho = knn_distances_within(samples_p, k_max, method);
  const MatrixXd nu = knn_distances(samples_p, samples_q, k_max, method);
  const double dim = static_cast<double>(samples_p.cols());
  const double offset = std::log(static_cast<double>(n_q) / static_cast<double>(n_p - 1));

  std::vector<double> out;
  out.reserve(ks.size());
  for (int k : ks) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n_p; ++i)
      sum += std::log(std::max(nu(i, k - 1), kDistanceFloor)) -
             std::log(std::max(rho(i, k - 1), kDistanceFloor));
    out.push_back(nats_to_bits(dim / static_cast<double>(n_p) * sum + offset));
  }
  return out;
}

DivergenceEstimate knn_kl(const MatrixXd& samples_p, const MatrixXd& samples_q, int k,
                          NeighborMethod method) {
  const double bits = knn_kl_multi(samples_p, samples_q, {k}, method).front();
  return {bits, k, samples_p.rows(), samples_q.rows(), samples_p.cols()};
}

}  // namespace evplane::divergence
