#include "evplane/plane/error_rates.hpp"

#include <algorithm>
#include <cmath>

namespace evplane::plane {

std::int64_t ErrorRates::total() const {
  std::int64_t n = 0;
  for (const auto& row : confusion)
    for (auto v : row) n += v;
  return n;
}

ErrorRates ErrorRates::from_confusion(std::vector<std::vector<std::int64_t>> confusion) {
  ErrorRates out;
  out.class_count = static_cast<int>(confusion.size());
  out.confusion = std::move(confusion);
  const std::size_t k = out.confusion.size();
  const std::int64_t n = out.total();
  if (n == 0) throw EvaluationError("no samples to evaluate");
  std::int64_t correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (out.confusion[c].size() != k) throw EvaluationError("confusion matrix is not square");
    std::int64_t support = 0, predicted_c = 0;
    for (std::size_t j = 0; j < k; ++j) {
      support += out.confusion[c][j];
      predicted_c += out.confusion[j][c];
    }
    const std::int64_t hits = out.confusion[c][c];
    const std::int64_t complement = n - support;
    if (support == 0) throw EvaluationError("class " + std::to_string(c) + " has no samples");
    if (complement == 0) throw EvaluationError("class " + std::to_string(c) + " has no complement");
    correct += hits;
    out.support.push_back(support);
    out.complement.push_back(complement);
    out.alpha.push_back(static_cast<double>(support - hits) / static_cast<double>(support));
    out.beta.push_back(static_cast<double>(predicted_c - hits) / static_cast<double>(complement));
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  return out;
}

ErrorRates per_class_error_rates(const Labels& predictions, const Labels& labels, int class_count) {
  if (predictions.size() != labels.size())
    throw EvaluationError("predictions and labels differ in length");
  if (labels.empty()) throw EvaluationError("empty evaluation set");
  if (class_count < 2) throw EvaluationError("need at least two classes");
  std::vector<std::vector<std::int64_t>> confusion(
      static_cast<std::size_t>(class_count),
      std::vector<std::int64_t>(static_cast<std::size_t>(class_count), 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i], p = predictions[i];
    if (y < 0 || y >= class_count || p < 0 || p >= class_count)
      throw EvaluationError("label or prediction out of range at " + std::to_string(i));
    ++confusion[static_cast<std::size_t>(y)][static_cast<std::size_t>(p)];
  }
  return ErrorRates::from_confusion(std::move(confusion));
}

double p_theta(const ErrorRates& rates) {
  double sum = 0.0;
  for (int c = 0; c < rates.class_count; ++c) {
    const auto i = static_cast<std::size_t>(c);
    const double floor = 1.0 / (static_cast<double>(rates.complement[i]) + 1.0);
    sum += -std::log2(std::max(rates.beta[i], floor));
  }
  return sum / static_cast<double>(rates.class_count);
}

EvidenceErrorPoint evidence_error_point(const ErrorRates& rates, double d_theta, int epoch,
                                        std::string model_id, std::string dataset_id) {
  return {p_theta(rates), d_theta, epoch, std::move(model_id), std::move(dataset_id)};
}

const char* to_string(RegionStatus status) {
  switch (status) {
    case RegionStatus::inside: return "inside";
    case RegionStatus::above_stein: return "above_stein";
    case RegionStatus::above_dpi: return "above_dpi";
    case RegionStatus::below_zero: return "below_zero";
  }
  return "unknown";
}

RegionStatus region_check(const EvidenceErrorPoint& point, const AchievableRegion& region,
                          double tol_bits) {
  if (!(tol_bits >= 0.0)) throw DomainError("tolerance must be non-negative");
  if (point.p_theta < -tol_bits || point.d_theta < -tol_bits) return RegionStatus::below_zero;
  if (point.p_theta > point.d_theta + tol_bits) return RegionStatus::above_stein;
  if (point.d_theta > region.d_inp + tol_bits) return RegionStatus::above_dpi;
  return RegionStatus::inside;
}

double stein_beta(double d_bits, int n) {
  if (n < 1) throw DomainError("sample count must be at least 1");
  if (!(d_bits >= 0.0)) throw DomainError("divergence must be non-negative");
  return std::exp2(-static_cast<double>(n) * d_bits);
}

}  // namespace evplane::plane
