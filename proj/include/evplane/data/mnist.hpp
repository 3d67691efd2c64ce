#ifndef EVPLANE_DATA_MNIST_HPP
#define EVPLANE_DATA_MNIST_HPP

#include "evplane/data/dataset.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace evplane::data {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Raised for malformed IDX input; `kind` tells the failure modes apart.
class MnistFormatError : public IngestionError {
 public:
  enum class Kind { unreadable, bad_magic, truncated, count_mismatch, bad_label };

  MnistFormatError(Kind kind, const std::string& what) : IngestionError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Parses big-endian IDX image and label streams. Pixels are scaled to
/// [0, 1]; labels must lie in 0..9. Nothing is returned on any error.
LabeledDataset load_mnist(std::istream& images, std::istream& labels);
LabeledDataset load_mnist(const std::string& image_path, const std::string& label_path);

/// Writes IDX streams for `data` (pixels rescaled to 0..255). Used to build
/// fixtures and to export subsets.
void write_idx(const LabeledDataset& data, int rows, int cols, std::ostream& images,
               std::ostream& labels);

}  // namespace evplane::data

#endif  // EVPLANE_DATA_MNIST_HPP
