#include "evplane/plane/envelope.hpp"

#include "evplane/common.hpp"
#include "evplane/data/gaussian.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace evplane::plane {

std::vector<EnvelopeRow> np_plane_data(double shift, const std::vector<double>& alphas) {
  std::vector<EnvelopeRow> rows;
  rows.reserve(alphas.size());
  for (double a : alphas) rows.push_back({a, data::gaussian_np_envelope(a, shift), a});
  return rows;
}

std::vector<double> alpha_grid(int count) {
  if (count < 1) throw DomainError("alpha grid needs at least one point");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = (i + 1.0) / (count + 1.0);
  return out;
}

double distance_to_envelope(double alpha, double beta, double shift) {
  auto dist2 = [&](double a) {
    const double da = a - alpha;
    const double db = data::gaussian_np_envelope(a, shift) - beta;
    return da * da + db * db;
  };
  // coarse scan, then Brent inside the best bracket
  constexpr int kScan = 2000;
  constexpr double kLo = 1e-12, kHi = 1.0 - 1e-12;
  int best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double a = kLo + (kHi - kLo) * i / kScan;
    const double d2 = dist2(a);
    if (d2 < best_d2) best_d2 = d2, best = i;
  }
  const double lo = kLo + (kHi - kLo) * std::max(best - 1, 0) / kScan;
  const double hi = kLo + (kHi - kLo) * std::min(best + 1, kScan) / kScan;
  const auto refined = boost::math::tools::brent_find_minima(dist2, lo, hi, 52);
  return std::sqrt(std::min(best_d2, refined.second));
}

double bayes_error(double shift) { return data::normal_cdf(-0.5 * shift); }

}  // namespace evplane::plane
