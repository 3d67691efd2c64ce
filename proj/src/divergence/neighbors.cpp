#include "evplane/divergence/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <utility>

namespace evplane::divergence {
namespace {

using Candidate = std::pair<double, Eigen::Index>;  // (squared distance, row)

void check_k(int k, Eigen::Index available) {
  if (k < 1) throw DomainError("k must be at least 1");
  if (k > available)
    throw SampleSizeError("k = " + std::to_string(k) + " exceeds the " +
                          std::to_string(available) + " available neighbours");
}

// Exact scan of one query; used when GEMM screening cannot certify its pick.
void exact_row(const double* q, const MatrixXd& ref, int k, Eigen::Index exclude,
               std::vector<Candidate>& buf, double* out) {
  buf.clear();
  for (Eigen::Index j = 0; j < ref.rows(); ++j)
    if (j != exclude) buf.emplace_back(squared_distance(q, ref.row(j).data(), ref.cols()), j);
  std::partial_sort(buf.begin(), buf.begin() + k, buf.end());
  for (int i = 0; i < k; ++i) out[i] = std::sqrt(buf[static_cast<std::size_t>(i)].first);
}

// Blocked brute force: a GEMM expansion ranks candidates, exact distances are
// recomputed for the shortlist, and rows whose shortlist cannot be certified
// against the expansion's rounding error fall back to an exact scan.
MatrixXd brute_force(const MatrixXd& queries, const MatrixXd& ref, int k, bool within) {
  constexpr Eigen::Index kBlock = 128;
  constexpr int kExtra = 16;
  const Eigen::Index m = ref.rows();
  const Eigen::Index dim = ref.cols();
  const VectorXd ref_norms = ref.rowwise().squaredNorm();
  const double max_ref_norm = m ? ref_norms.maxCoeff() : 0.0;
  MatrixXd out(queries.rows(), k);
  std::vector<Candidate> buf;
  buf.reserve(static_cast<std::size_t>(m));
  std::vector<Candidate> shortlist;

  for (Eigen::Index start = 0; start < queries.rows(); start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, queries.rows() - start);
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> gram =
        queries.middleRows(start, rows) * ref.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index qi = start + r;
      const double* q = queries.row(qi).data();
      const Eigen::Index exclude = within ? qi : -1;
      const double qn = queries.row(qi).squaredNorm();
      buf.clear();
      for (Eigen::Index j = 0; j < m; ++j)
        if (j != exclude) buf.emplace_back(qn + ref_norms(j) - 2.0 * gram(r, j), j);
      const auto available = static_cast<Eigen::Index>(buf.size());
      const Eigen::Index keep = std::min<Eigen::Index>(available, k + kExtra);
      double rest_floor = std::numeric_limits<double>::infinity();
      if (keep < available) {
        std::nth_element(buf.begin(), buf.begin() + keep, buf.end());
        rest_floor = buf[static_cast<std::size_t>(keep)].first;
      }
      shortlist.assign(buf.begin(), buf.begin() + keep);
      for (auto& c : shortlist) c.first = squared_distance(q, ref.row(c.second).data(), dim);
      std::partial_sort(shortlist.begin(), shortlist.begin() + k, shortlist.end());
      const double tol = 1e-10 * (qn + max_ref_norm) + 1e-300;
      if (shortlist[static_cast<std::size_t>(k) - 1].first <= rest_floor - tol) {
        for (int i = 0; i < k; ++i) out(qi, i) = std::sqrt(shortlist[static_cast<std::size_t>(i)].first);
      } else {
        exact_row(q, ref, k, exclude, buf, out.row(qi).data());
      }
    }
  }
  return out;
}

bool use_tree(NeighborMethod method, Eigen::Index dim) {
  if (method == NeighborMethod::automatic) return dim <= kKdTreeMaxDim;
  return method == NeighborMethod::kd_tree;
}

}  // namespace

KdTree::KdTree(const MatrixXd& points, int leaf_size) : points_(points), leaf_size_(leaf_size) {
  order_.resize(static_cast<std::size_t>(points.rows()));
  std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  if (points.rows() > 0) build(0, points.rows());
}

int KdTree::build(Eigen::Index begin, Eigen::Index end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= leaf_size_) return id;

  int best_dim = 0;
  double best_spread = -1.0;
  for (Eigen::Index d = 0; d < points_.cols(); ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index i = begin; i < end; ++i) {
      const double v = points_(order_[static_cast<std::size_t>(i)], d);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = static_cast<int>(d);
    }
  }
  if (best_spread <= 0.0) return id;  // all points coincide

  const Eigen::Index mid = begin + (end - begin) / 2;
  auto first = order_.begin() + begin;
  std::nth_element(first, order_.begin() + mid, order_.begin() + end,
                   [&](Eigen::Index a, Eigen::Index b) {
                     return points_(a, best_dim) < points_(b, best_dim);
                   });
  const double split = points_(order_[static_cast<std::size_t>(mid)], best_dim);
  nodes_[static_cast<std::size_t>(id)].split_dim = best_dim;
  nodes_[static_cast<std::size_t>(id)].split = split;
  // Left holds rows with value <= split, right those with value >= split.
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

void KdTree::query(const double* q, int k, Eigen::Index exclude, double* out_distances) const {
  std::priority_queue<Candidate> heap;  // max-heap on (distance, row)
  const Eigen::Index dim = points_.cols();
  auto visit = [&](auto&& self, int node_id) -> void {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.split_dim < 0) {
      for (Eigen::Index i = node.begin; i < node.end; ++i) {
        const Eigen::Index row = order_[static_cast<std::size_t>(i)];
        if (row == exclude) continue;
        const Candidate c{squared_distance(q, points_.row(row).data(), dim), row};
        if (static_cast<int>(heap.size()) < k) {
          heap.push(c);
        } else if (c < heap.top()) {
          heap.pop();
          heap.push(c);
        }
      }
      return;
    }
    const double diff = q[node.split_dim] - node.split;
    const int near = diff <= 0.0 ? node.left : node.right;
    const int far = diff <= 0.0 ? node.right : node.left;
    self(self, near);
    if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().first) self(self, far);
  };
  if (!nodes_.empty()) visit(visit, 0);
  for (int i = static_cast<int>(heap.size()); i-- > 0;) {
    out_distances[i] = std::sqrt(heap.top().first);
    heap.pop();
  }
}

MatrixXd knn_distances(const MatrixXd& queries, const MatrixXd& reference, int k,
                       NeighborMethod method) {
  if (queries.cols() != reference.cols())
    throw ShapeError("query dimension " + std::to_string(queries.cols()) +
                     " differs from reference dimension " + std::to_string(reference.cols()));
  check_k(k, reference.rows());
  if (!use_tree(method, reference.cols())) return brute_force(queries, reference, k, false);
  const KdTree tree(reference);
  MatrixXd out(queries.rows(), k);
  for (Eigen::Index i = 0; i < queries.rows(); ++i) tree.query(queries.row(i).data(), k, -1, out.row(i).data());
  return out;
}

MatrixXd knn_distances_within(const MatrixXd& points, int k, NeighborMethod method) {
  check_k(k, points.rows() - 1);
  if (!use_tree(method, points.cols())) return brute_force(points, points, k, true);
  const KdTree tree(points);
  MatrixXd out(points.rows(), k);
  for (Eigen::Index i = 0; i < points.rows(); ++i) tree.query(points.row(i).data(), k, i, out.row(i).data());
  return out;
}

}  // namespace evplane::divergence
