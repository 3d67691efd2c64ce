#ifndef EVPLANE_DATA_DATASET_HPP
#define EVPLANE_DATA_DATASET_HPP

#include "evplane/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace evplane::data {

/// Features (n x d), labels in [0, class_count), and, when the generator
/// knows it, the class-averaged input divergence in bits.
struct LabeledDataset {
  MatrixXd features;
  Labels labels;
  int class_count = 0;
  std::optional<double> analytic_divergence;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  /// Throws GenerationError when a class is missing or a feature is not finite.
  void validate() const;

  std::vector<Eigen::Index> indices_of(int label) const;
  std::vector<Eigen::Index> class_counts() const;

  LabeledDataset subset(const std::vector<Eigen::Index>& rows) const;
};

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// Seeded shuffle followed by a cut at round(n * (1 - test_fraction)).
/// Each class keeps at least one sample on each side when it has two.
TrainTestSplit split_train_test(const LabeledDataset& data, double test_fraction,
                                std::uint64_t seed);

/// Rows of `matrix` selected by `rows`.
MatrixXd gather_rows(const MatrixXd& matrix, const std::vector<Eigen::Index>& rows);

/// CSV export with header "label,f0,f1,...".
void write_csv(const LabeledDataset& data, std::ostream& out);
void write_csv(const LabeledDataset& data, const std::string& path);

}  // namespace evplane::data

#endif  // EVPLANE_DATA_DATASET_HPP
