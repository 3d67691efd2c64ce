#ifndef EVPLANE_DIVERGENCE_KNN_KL_HPP
#define EVPLANE_DIVERGENCE_KNN_KL_HPP

#include "evplane/divergence/neighbors.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace evplane::divergence {

/// Distances below this are floored before taking logarithms.
inline constexpr double kDistanceFloor = 1e-300;

struct DivergenceEstimate {
  double bits = 0.0;
  int k_used = 0;
  Eigen::Index n_p = 0;
  Eigen::Index n_q = 0;
  Eigen::Index dimension = 0;
};

/// k-NN divergence estimate of D(P || Q) from samples (rows):
///
///   D = (dim / n_p) sum_i ln(nu_k(x_i) / rho_k(x_i)) + ln(n_q / (n_p - 1))
///
/// with rho_k the k-th neighbour distance of x_i within P (x_i excluded) and
/// nu_k the k-th neighbour distance from x_i into Q. Reported in bits.
DivergenceEstimate knn_kl(const MatrixXd& samples_p, const MatrixXd& samples_q, int k,
                          NeighborMethod method = NeighborMethod::automatic);

/// Same estimator for several k from one neighbour search; bits, in the
/// order of `ks`.
std::vector<double> knn_kl_multi(const MatrixXd& samples_p, const MatrixXd& samples_q,
                                 const std::vector<int>& ks,
                                 NeighborMethod method = NeighborMethod::automatic);

}  // namespace evplane::divergence

#endif  // EVPLANE_DIVERGENCE_KNN_KL_HPP
