#include "evplane/data/yin_yang.hpp"

#include <cmath>
#include <random>

namespace evplane::data {

void YinYangSpec::validate() const {
  if (!(big_radius > 0.0)) throw DomainError("big radius must be positive");
  if (!(dot_radius > 0.0 && dot_radius < 0.5 * big_radius))
    throw DomainError("dot radius must lie in (0, big_radius / 2)");
  if (samples_per_class < 1) throw DomainError("samples_per_class must be at least 1");
  if (rejection_budget < 1) throw DomainError("rejection budget must be positive");
}

int yin_yang_class(double x, double y, const YinYangSpec& spec) {
  const double r = spec.big_radius;
  if (std::hypot(x - r, y - r) > r) return -1;
  const double d_right = std::hypot(x - 1.5 * r, y - r);
  const double d_left = std::hypot(x - 0.5 * r, y - r);
  if (d_right < spec.dot_radius || d_left < spec.dot_radius) return 2;
  const bool yin = (d_left > spec.dot_radius && d_left <= 0.5 * r) ||
                   (y > r && d_right > 0.5 * r);
  return yin ? 0 : 1;
}

LabeledDataset gen_yin_yang(const YinYangSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 2.0 * spec.big_radius);
  const Eigen::Index n = 3 * static_cast<Eigen::Index>(spec.samples_per_class);
  LabeledDataset out;
  out.features.resize(n, 4);
  out.labels.resize(static_cast<std::size_t>(n));
  out.class_count = 3;
  long draws = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int goal = static_cast<int>(i % 3);
    double x = 0.0, y = 0.0;
    do {
      if (++draws > spec.rejection_budget)
        throw GenerationError("yin-yang rejection budget exhausted");
      x = coord(rng);
      y = coord(rng);
    } while (yin_yang_class(x, y, spec) != goal);
    out.features.row(i) << x, y, 1.0 - x, 1.0 - y;
    out.labels[static_cast<std::size_t>(i)] = goal;
  }
  return out;
}

}  // namespace evplane::data
