#ifndef EVPLANE_DATA_GAUSSIAN_HPP
#define EVPLANE_DATA_GAUSSIAN_HPP

#include "evplane/data/dataset.hpp"

#include <cstdint>

namespace evplane::data {

/// Two unit-covariance Gaussians; class 1 is shifted by `mean_shift` along
/// the first coordinate.
struct GaussianSpec {
  int dimension = 4;
  double mean_shift = 1.0;
  int samples_per_class = 5000;

  void validate() const;
};

/// Class 0 rows first, then class 1. The analytic divergence is
/// shift^2 / 2 nats, stored in bits.
LabeledDataset gen_gaussian_pair(const GaussianSpec& spec, std::uint64_t seed);

double normal_cdf(double x);
double normal_quantile(double p);

/// Neyman-Pearson envelope for the unit-variance shift problem:
/// beta*(alpha) = Phi(Phi^-1(1 - alpha) - shift).
double gaussian_np_envelope(double alpha, double shift);

}  // namespace evplane::data

#endif  // EVPLANE_DATA_GAUSSIAN_HPP
