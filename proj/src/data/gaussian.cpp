#include "evplane/data/gaussian.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>
#include <random>

namespace evplane::data {

void GaussianSpec::validate() const {
  if (dimension < 1) throw DomainError("gaussian dimension must be at least 1");
  if (!(mean_shift >= 0.0) || !std::isfinite(mean_shift))
    throw DomainError("mean shift must be finite and non-negative");
  if (samples_per_class < 1) throw DomainError("samples_per_class must be at least 1");
}

LabeledDataset gen_gaussian_pair(const GaussianSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = 2 * static_cast<Eigen::Index>(spec.samples_per_class);
  LabeledDataset out;
  out.features.resize(n, spec.dimension);
  out.labels.resize(static_cast<std::size_t>(n));
  out.class_count = 2;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = i < spec.samples_per_class ? 0 : 1;
    for (int j = 0; j < spec.dimension; ++j) out.features(i, j) = normal(rng);
    if (label == 1) out.features(i, 0) += spec.mean_shift;
    out.labels[static_cast<std::size_t>(i)] = label;
  }
  out.analytic_divergence = nats_to_bits(0.5 * spec.mean_shift * spec.mean_shift);
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile probability must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double gaussian_np_envelope(double alpha, double shift) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return normal_cdf(normal_quantile(1.0 - alpha) - shift);
}

}  // namespace evplane::data
