#ifndef EVPLANE_PLANE_ERROR_RATES_HPP
#define EVPLANE_PLANE_ERROR_RATES_HPP

#include "evplane/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace evplane::plane {

/// One-vs-rest error rates for every class, with the confusion counts they
/// come from. For class c: alpha_c = P(pred != c | y = c) and
/// beta_c = P(pred = c | y != c).
struct ErrorRates {
  int class_count = 0;
  std::vector<std::vector<std::int64_t>> confusion;  // [label][prediction]
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::int64_t> support;         // samples with label c
  std::vector<std::int64_t> complement;      // samples with label != c
  double accuracy = 0.0;

  std::int64_t total() const;
  /// Rebuilds every rate from `confusion`.
  static ErrorRates from_confusion(std::vector<std::vector<std::int64_t>> confusion);
};

ErrorRates per_class_error_rates(const Labels& predictions, const Labels& labels, int class_count);

struct EvidenceErrorPoint {
  double p_theta = 0.0;  // bits
  double d_theta = 0.0;  // bits
  int epoch = 0;
  std::string model_id;
  std::string dataset_id;
};

/// P_theta = (1/K) sum_c -log2(max(beta_c, 1/(N_not_c + 1))).
double p_theta(const ErrorRates& rates);
EvidenceErrorPoint evidence_error_point(const ErrorRates& rates, double d_theta, int epoch,
                                        std::string model_id = {}, std::string dataset_id = {});

/// {0 <= P <= D <= d_inp}.
struct AchievableRegion {
  double d_inp = 0.0;
};

enum class RegionStatus { inside, above_stein, above_dpi, below_zero };
const char* to_string(RegionStatus status);

RegionStatus region_check(const EvidenceErrorPoint& point, const AchievableRegion& region,
                          double tol_bits);

/// Asymptotic type-II error 2^(-n d) for an exponent of d bits.
double stein_beta(double d_bits, int n);

}  // namespace evplane::plane

#endif  // EVPLANE_PLANE_ERROR_RATES_HPP
