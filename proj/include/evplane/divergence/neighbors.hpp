#ifndef EVPLANE_DIVERGENCE_NEIGHBORS_HPP
#define EVPLANE_DIVERGENCE_NEIGHBORS_HPP

#include "evplane/common.hpp"

#include <cstdint>
#include <vector>

namespace evplane::divergence {

enum class NeighborMethod { automatic, brute_force, kd_tree };

/// Dimensions up to this use the kd-tree under NeighborMethod::automatic.
inline constexpr Eigen::Index kKdTreeMaxDim = 10;

/// Squared Euclidean distance with a fixed summation order. Every search
/// path reports distances through this function, so brute force and the
/// kd-tree agree bit for bit.
inline double squared_distance(const double* a, const double* b, Eigen::Index dim) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

/// Exact k-nearest-neighbour index over the rows of a matrix. Neighbours are
/// ordered by (distance, row index).
class KdTree {
 public:
  explicit KdTree(const MatrixXd& points, int leaf_size = 16);

  /// Sorted distances to the k nearest rows of the indexed set, skipping row
  /// `exclude` (pass -1 to keep every row).
  void query(const double* q, int k, Eigen::Index exclude, double* out_distances) const;

 private:
  struct Node {
    Eigen::Index begin, end;  // range into order_
    int split_dim = -1;       // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
  };
  int build(Eigen::Index begin, Eigen::Index end);

  const MatrixXd& points_;
  int leaf_size_;
  std::vector<Eigen::Index> order_;
  std::vector<Node> nodes_;
};

/// (n_queries x k) sorted k-NN distances from each query row into `reference`.
MatrixXd knn_distances(const MatrixXd& queries, const MatrixXd& reference, int k,
                       NeighborMethod method = NeighborMethod::automatic);

/// (n x k) sorted k-NN distances of each row of `points` to the other rows.
MatrixXd knn_distances_within(const MatrixXd& points, int k,
                              NeighborMethod method = NeighborMethod::automatic);

}  // namespace evplane::divergence

#endif  // EVPLANE_DIVERGENCE_NEIGHBORS_HPP
