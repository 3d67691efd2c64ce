#include "evplane/snn/support.hpp"

#include "evplane/common.hpp"

#include <algorithm>
#include <cmath>

namespace evplane::snn {

std::uint64_t membrane_support_bound(int time_steps) {
  if (time_steps < 1) throw DomainError("time_steps must be at least 1");
  if (time_steps > 30) throw DomainError("bound overflows 64 bits beyond 30 time steps");
  const std::uint64_t pow4 = std::uint64_t{1} << (2 * (time_steps + 1));
  return (pow4 - 4) / 3;
}

std::vector<double> enumerate_reachable_potentials(double weight, double threshold, double leak,
                                                   int time_steps) {
  if (time_steps < 1) throw DomainError("time_steps must be at least 1");
  if (time_steps > 10) throw ResourceError("enumeration limited to 10 time steps");
  std::vector<double> values;
  const unsigned histories = 1u << time_steps;
  values.reserve(static_cast<std::size_t>(histories) * time_steps);
  for (unsigned h = 0; h < histories; ++h) {
    double u = 0.0;
    bool fired = false;
    for (int t = 0; t < time_steps; ++t) {
      const bool in = (h >> t) & 1u;
      u = leak * u + (in ? weight : 0.0);
      if (fired) u -= threshold;
      fired = u >= threshold;
      values.push_back(u);
    }
  }
  std::sort(values.begin(), values.end());
  std::vector<double> distinct;
  for (double v : values)
    if (distinct.empty() || std::abs(v - distinct.back()) > 1e-12 * std::max(1.0, std::abs(v)))
      distinct.push_back(v);
  return distinct;
}

}  // namespace evplane::snn
