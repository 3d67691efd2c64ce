#include "evplane/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>

namespace evplane::data {

void LabeledDataset::validate() const {
  if (class_count < 1) throw GenerationError("class count must be positive");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw GenerationError("label count does not match feature rows");
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) {
    if (y < 0 || y >= class_count)
      throw GenerationError("label " + std::to_string(y) + " out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  for (int c = 0; c < class_count; ++c)
    if (counts[static_cast<std::size_t>(c)] == 0)
      throw GenerationError("class " + std::to_string(c) + " has no samples");
  if (!features.allFinite()) throw GenerationError("non-finite feature entry");
}

std::vector<Eigen::Index> LabeledDataset::indices_of(int label) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(static_cast<Eigen::Index>(i));
  return out;
}

std::vector<Eigen::Index> LabeledDataset::class_counts() const {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(class_count), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

MatrixXd gather_rows(const MatrixXd& matrix, const std::vector<Eigen::Index>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), matrix.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = matrix.row(rows[i]);
  return out;
}

LabeledDataset LabeledDataset::subset(const std::vector<Eigen::Index>& rows) const {
  LabeledDataset out;
  out.features = gather_rows(features, rows);
  out.labels.reserve(rows.size());
  for (Eigen::Index r : rows) out.labels.push_back(labels[static_cast<std::size_t>(r)]);
  out.class_count = class_count;
  out.analytic_divergence = analytic_divergence;
  return out;
}

TrainTestSplit split_train_test(const LabeledDataset& data, double test_fraction,
                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw DomainError("test fraction must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::vector<Eigen::Index> train_rows, test_rows;
  for (int c = 0; c < data.class_count; ++c) {
    auto rows = data.indices_of(c);
    std::shuffle(rows.begin(), rows.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * rows.size()));
    if (rows.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + n_test);
    train_rows.insert(train_rows.end(), rows.begin() + n_test, rows.end());
  }
  std::shuffle(train_rows.begin(), train_rows.end(), rng);
  std::shuffle(test_rows.begin(), test_rows.end(), rng);
  return {data.subset(train_rows), data.subset(test_rows)};
}

void write_csv(const LabeledDataset& data, std::ostream& out) {
  out << "label";
  for (Eigen::Index j = 0; j < data.dim(); ++j) out << ",f" << j;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << data.labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << ',' << data.features(i, j);
    out << '\n';
  }
}

void write_csv(const LabeledDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot open " + path + " for writing");
  write_csv(data, out);
}

}  // namespace evplane::data
