#ifndef EVPLANE_DATA_YIN_YANG_HPP
#define EVPLANE_DATA_YIN_YANG_HPP

#include "evplane/data/dataset.hpp"

#include <cstdint>

namespace evplane::data {

/// Three-class yin (0), yang (1), dot (2) disk. The big disk of radius
/// big_radius sits at (big_radius, big_radius); the two dots of radius
/// dot_radius sit at the centres of the half-radius inner circles.
struct YinYangSpec {
  double big_radius = 0.5;
  double dot_radius = 0.125;
  int samples_per_class = 1000;
  long rejection_budget = 100'000'000;

  void validate() const;
};

/// Class of a point inside the big disk, or -1 outside it.
int yin_yang_class(double x, double y, const YinYangSpec& spec);

/// Rejection sampling, one class at a time in round-robin order; features are
/// (x, y, 1 - x, 1 - y).
LabeledDataset gen_yin_yang(const YinYangSpec& spec, std::uint64_t seed);

}  // namespace evplane::data

#endif  // EVPLANE_DATA_YIN_YANG_HPP
