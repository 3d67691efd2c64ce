#include "evplane/data/mnist.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

namespace evplane::data {
namespace {

using Kind = MnistFormatError::Kind;

std::uint32_t read_be32(std::istream& in, const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw MnistFormatError(Kind::truncated, std::string("truncated header: ") + what);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) |
         std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

LabeledDataset load_mnist(std::istream& images, std::istream& labels) {
  if (const auto magic = read_be32(images, "image magic"); magic != kIdxImageMagic)
    throw MnistFormatError(Kind::bad_magic, "image file magic " + std::to_string(magic));
  if (const auto magic = read_be32(labels, "label magic"); magic != kIdxLabelMagic)
    throw MnistFormatError(Kind::bad_magic, "label file magic " + std::to_string(magic));

  const std::uint32_t n_images = read_be32(images, "image count");
  const std::uint32_t rows = read_be32(images, "row count");
  const std::uint32_t cols = read_be32(images, "column count");
  const std::uint32_t n_labels = read_be32(labels, "label count");
  if (n_images != n_labels)
    throw MnistFormatError(Kind::count_mismatch, std::to_string(n_images) + " images but " +
                                                     std::to_string(n_labels) + " labels");
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096)
    throw MnistFormatError(Kind::truncated, "implausible image shape");

  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  std::vector<unsigned char> raw(static_cast<std::size_t>(n_images) * pixels);
  if (!images.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw MnistFormatError(Kind::truncated, "image payload shorter than header declares");
  std::vector<unsigned char> raw_labels(n_labels);
  if (!labels.read(reinterpret_cast<char*>(raw_labels.data()),
                   static_cast<std::streamsize>(raw_labels.size())))
    throw MnistFormatError(Kind::truncated, "label payload shorter than header declares");

  LabeledDataset out;
  out.class_count = 10;
  out.features.resize(n_images, static_cast<Eigen::Index>(pixels));
  out.labels.resize(n_images);
  for (std::size_t i = 0; i < n_images; ++i) {
    if (raw_labels[i] > 9)
      throw MnistFormatError(Kind::bad_label, "label " + std::to_string(raw_labels[i]) + " at " +
                                                  std::to_string(i));
    out.labels[i] = raw_labels[i];
    for (std::size_t j = 0; j < pixels; ++j)
      out.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          raw[i * pixels + j] / 255.0;
  }
  return out;
}

LabeledDataset load_mnist(const std::string& image_path, const std::string& label_path) {
  std::ifstream images(image_path, std::ios::binary);
  if (!images) throw MnistFormatError(Kind::unreadable, "cannot open " + image_path);
  std::ifstream labels(label_path, std::ios::binary);
  if (!labels) throw MnistFormatError(Kind::unreadable, "cannot open " + label_path);
  return load_mnist(images, labels);
}

void write_idx(const LabeledDataset& data, int rows, int cols, std::ostream& images,
               std::ostream& labels) {
  if (static_cast<Eigen::Index>(rows) * cols != data.dim())
    throw ShapeError("image shape does not match feature width");
  write_be32(images, kIdxImageMagic);
  write_be32(images, static_cast<std::uint32_t>(data.size()));
  write_be32(images, static_cast<std::uint32_t>(rows));
  write_be32(images, static_cast<std::uint32_t>(cols));
  write_be32(labels, kIdxLabelMagic);
  write_be32(labels, static_cast<std::uint32_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j)
      images.put(static_cast<char>(std::lround(std::clamp(data.features(i, j), 0.0, 1.0) * 255.0)));
    labels.put(static_cast<char>(data.labels[static_cast<std::size_t>(i)]));
  }
}

}  // namespace evplane::data
