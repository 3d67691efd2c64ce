#include "evplane/nn/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace evplane::nn {
namespace wire {
namespace {

template <typename UInt>
void put_le(std::ostream& out, UInt v) {
  char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes, sizeof(UInt));
}

template <typename UInt>
UInt get_le(std::istream& in) {
  unsigned char bytes[sizeof(UInt)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(UInt)))
    throw IngestionError("truncated snapshot");
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void put_u16(std::ostream& out, std::uint16_t v) { put_le(out, v); }
void put_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
std::uint16_t get_u16(std::istream& in) { return get_le<std::uint16_t>(in); }
std::uint32_t get_u32(std::istream& in) { return get_le<std::uint32_t>(in); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

void put_magic(std::ostream& out, const std::array<char, 4>& magic) {
  out.write(magic.data(), 4);
}

void expect_magic(std::istream& in, const std::array<char, 4>& magic) {
  char got[4];
  if (!in.read(got, 4)) throw IngestionError("truncated snapshot header");
  if (std::memcmp(got, magic.data(), 4) != 0)
    throw IngestionError("bad snapshot magic, expected " + std::string(magic.data(), 4));
}

void put_layers(std::ostream& out, const DenseNetworkd& net) {
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (int d : net.layer_dims) put_u32(out, static_cast<std::uint32_t>(d));
  for (const auto& layer : net.layers) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) put_f64(out, layer.weight(i, j));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) put_f64(out, layer.bias(i));
  }
}

DenseNetworkd get_layers(std::istream& in) {
  const std::uint32_t count = get_u32(in);
  if (count == 0 || count > 4096) throw IngestionError("implausible layer count");
  DenseNetworkd net;
  for (std::uint32_t i = 0; i <= count; ++i) {
    const std::uint32_t d = get_u32(in);
    if (d == 0 || d > (1u << 24)) throw IngestionError("implausible layer width");
    net.layer_dims.push_back(static_cast<int>(d));
  }
  for (std::uint32_t l = 0; l < count; ++l) {
    DenseLayer<double> layer;
    layer.weight.resize(net.layer_dims[l + 1], net.layer_dims[l]);
    layer.bias.resize(net.layer_dims[l + 1]);
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = get_f64(in);
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = get_f64(in);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace wire

void write_snapshot(const DenseNetworkd& net, std::ostream& out) {
  wire::put_magic(out, kDenseMagic);
  wire::put_u16(out, kSnapshotVersion);
  wire::put_layers(out, net);
}

DenseNetworkd read_snapshot(std::istream& in) {
  wire::expect_magic(in, kDenseMagic);
  const auto version = wire::get_u16(in);
  if (version != kSnapshotVersion)
    throw IngestionError("unsupported snapshot version " + std::to_string(version));
  return wire::get_layers(in);
}

void save_snapshot(const DenseNetworkd& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open " + path);
  write_snapshot(net, out);
}

DenseNetworkd load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path);
  return read_snapshot(in);
}

}  // namespace evplane::nn
