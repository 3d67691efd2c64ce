#ifndef EVPLANE_HARNESS_FORMAT_HPP
#define EVPLANE_HARNESS_FORMAT_HPP

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace evplane::harness {

/// Shortest text that reads back to the same double; "nan"/"inf" otherwise.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace evplane::harness

#endif  // EVPLANE_HARNESS_FORMAT_HPP
