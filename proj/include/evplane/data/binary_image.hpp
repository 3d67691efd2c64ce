#ifndef EVPLANE_DATA_BINARY_IMAGE_HPP
#define EVPLANE_DATA_BINARY_IMAGE_HPP

#include "evplane/data/dataset.hpp"

#include <cstdint>
#include <span>
#include <variant>

namespace evplane::data {

/// d x d binary images: class 0 is a white row, class 1 a white column, each
/// pixel passed through a binary symmetric channel with flip probability p.
struct BinaryImageSpec {
  int side = 8;
  double flip_prob = 0.1;

  void validate() const;
  /// Channel likelihood-ratio base lambda = p / (1 - p).
  double lambda() const { return flip_prob / (1.0 - flip_prob); }
  int pixels() const { return side * side; }
};

/// Samples are interleaved class by class; features are the row-major
/// flattened pixels in {0, 1}. The analytic divergence is filled from the
/// exact oracle for side <= 6 and from a 10^6-sample Monte Carlo run beyond.
LabeledDataset gen_binary_image(const BinaryImageSpec& spec, int samples_per_class,
                                std::uint64_t seed);

/// Row-versus-column log-likelihood ratio of one flattened image, in bits:
/// log sum_r lambda^(-2 a_r) - log sum_c lambda^(-2 b_c), with a_r and b_c the
/// row and column sums.
/// Throws DomainError on a non-binary entry or a size other than side^2.
double binary_image_llr(std::span<const double> pixels, const BinaryImageSpec& spec);

struct ExactKl {};
struct MonteCarloKl {
  long samples = 1'000'000;
  std::uint64_t seed = 0;
};
using KlMethod = std::variant<ExactKl, MonteCarloKl>;

struct KlValue {
  double bits = 0.0;
  double standard_error = 0.0;  // zero for the exact method
};

/// D(P_R || P_C) in bits. The exact method enumerates the joint law of the
/// row counts and of the column counts under one template (side <= 6); the
/// Monte Carlo method averages the LLR over fresh row-class samples.
KlValue binary_image_analytic_kl(const BinaryImageSpec& spec, const KlMethod& method);

}  // namespace evplane::data

#endif  // EVPLANE_DATA_BINARY_IMAGE_HPP
