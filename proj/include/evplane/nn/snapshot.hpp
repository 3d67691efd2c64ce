#ifndef EVPLANE_NN_SNAPSHOT_HPP
#define EVPLANE_NN_SNAPSHOT_HPP

#include "evplane/nn/dense_network.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace evplane::nn {

// Binary network container, all integers and floats little-endian:
//
//   magic     4 bytes   "SLNN" (dense) or "SLSN" (spiking)
//   version   u16       kSnapshotVersion
//   [header]            spiking only: leak f64, threshold f64,
//                       time_steps u32, surrogate_slope f64
//   layers    u32       number of affine layers L
//   dims      u32 x (L+1)
//   per layer: weight f64 x (out*in) row-major, then bias f64 x out
inline constexpr std::uint16_t kSnapshotVersion = 1;
inline constexpr std::array<char, 4> kDenseMagic{'S', 'L', 'N', 'N'};
inline constexpr std::array<char, 4> kSpikingMagic{'S', 'L', 'S', 'N'};

namespace wire {
void put_u16(std::ostream& out, std::uint16_t v);
void put_u32(std::ostream& out, std::uint32_t v);
void put_f64(std::ostream& out, double v);
std::uint16_t get_u16(std::istream& in);
std::uint32_t get_u32(std::istream& in);
double get_f64(std::istream& in);
void put_magic(std::ostream& out, const std::array<char, 4>& magic);
/// Reads four bytes and throws IngestionError unless they equal `magic`.
void expect_magic(std::istream& in, const std::array<char, 4>& magic);
void put_layers(std::ostream& out, const DenseNetworkd& net);
DenseNetworkd get_layers(std::istream& in);
}  // namespace wire

void write_snapshot(const DenseNetworkd& net, std::ostream& out);
DenseNetworkd read_snapshot(std::istream& in);

void save_snapshot(const DenseNetworkd& net, const std::string& path);
DenseNetworkd load_snapshot(const std::string& path);

}  // namespace evplane::nn

#endif  // EVPLANE_NN_SNAPSHOT_HPP
