#ifndef EVPLANE_DIVERGENCE_CLASS_CONDITIONAL_HPP
#define EVPLANE_DIVERGENCE_CLASS_CONDITIONAL_HPP

#include "evplane/data/dataset.hpp"
#include "evplane/divergence/knn_kl.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace evplane::divergence {

struct KnnEstimatorConfig {
  std::optional<int> k;  // empty selects k by null consistency
  std::vector<int> candidate_ks{1, 2, 3, 5, 7, 10, 15, 20, 30};
  int null_splits = 10;
  double noise_sigma = 1e-6;
  std::uint64_t seed = 0;
  NeighborMethod method = NeighborMethod::automatic;

  void validate() const;
};

struct NullConsistency {
  int k = 0;
  std::vector<int> candidates;  // ascending
  std::vector<double> bias;     // average null estimate per candidate, bits
};

/// Averages the estimator over `null_splits` random disjoint half-splits of
/// `samples` for every candidate k and keeps the k with the smallest
/// |average|; exact ties go to the smaller k.
NullConsistency null_consistency(const MatrixXd& samples, const KnnEstimatorConfig& cfg);
int select_k_null_consistency(const MatrixXd& samples, const KnnEstimatorConfig& cfg);

/// samples + sigma * N(0, 1) per entry. The draws depend only on the seed and
/// the shape, so one seed gives the same noise directions for every sigma.
MatrixXd inject_noise(const MatrixXd& samples, double sigma, std::uint64_t seed);

/// u_i = Z_i - Z_K for i < K: drops the softmax shift direction.
MatrixXd project_logits(const MatrixXd& logits);

/// Per-class sample matrices with a common dimension.
struct ClassConditionalBundle {
  std::vector<MatrixXd> groups;

  int class_count() const { return static_cast<int>(groups.size()); }
  void validate() const;

  /// Groups by label, each truncated to its first `max_per_class` rows
  /// (0 keeps everything).
  static ClassConditionalBundle from_dataset(const data::LabeledDataset& dataset,
                                             Eigen::Index max_per_class = 0);
};

/// Maps noisy inputs to the representation the estimator sees.
using RepresentationMap = std::function<MatrixXd(const MatrixXd&)>;

struct ClassConditionalResult {
  double bits = 0.0;  // class average
  std::vector<DivergenceEstimate> per_class;
  int k_used = 0;
};

/// (1/K) sum_c D(rep_c || rep_not_c), the complement pooled from all other
/// classes. Noise is added to the groups first and the map applied after, so
/// the processing chain inputs -> noisy inputs -> representation holds.
ClassConditionalResult class_conditional_divergence(const ClassConditionalBundle& bundle,
                                                    const KnnEstimatorConfig& cfg,
                                                    const RepresentationMap& map = {});

/// D_sigma for every sigma. With automatic k, k is resolved once at the first
/// sigma and held fixed over the sweep.
struct NoisePoint {
  double sigma = 0.0;
  double bits = 0.0;
  int k_used = 0;
};

std::vector<NoisePoint> noise_sweep(const ClassConditionalBundle& bundle,
                                    const std::vector<double>& sigmas,
                                    const KnnEstimatorConfig& cfg,
                                    const RepresentationMap& map = {});

}  // namespace evplane::divergence

#endif  // EVPLANE_DIVERGENCE_CLASS_CONDITIONAL_HPP
