#ifndef EVPLANE_SNN_SNN_TRAIN_HPP
#define EVPLANE_SNN_SNN_TRAIN_HPP

#include "evplane/data/dataset.hpp"
#include "evplane/nn/train.hpp"
#include "evplane/snn/lif.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

namespace evplane::snn {

using SpikingEpochHook = std::function<void(const nn::EpochSummary&, const nn::DenseNetworkd&)>;

/// Surrogate-gradient training: fresh Poisson spikes per batch, membrane-sum
/// logits, cross-entropy and Adam as for the dense network.
nn::DenseNetworkd snn_train(nn::DenseNetworkd net, const data::LabeledDataset& dataset,
                            const SNNConfig& cfg, const SpikingEpochHook& epoch_hook = {});

/// Time-summed output-layer membrane potential for every row of `features`,
/// encoded with `seed`. Evaluated in chunks to bound memory.
MatrixXd snn_logits(const nn::DenseNetworkd& net, const MatrixXd& features, const SNNConfig& cfg,
                    std::uint64_t seed);

struct SpikingNetwork {
  nn::DenseNetworkd weights;
  SNNConfig config;
};

void write_snapshot(const SpikingNetwork& net, std::ostream& out);
SpikingNetwork read_spiking_snapshot(std::istream& in);
void save_snapshot(const SpikingNetwork& net, const std::string& path);
SpikingNetwork load_spiking_snapshot(const std::string& path);

}  // namespace evplane::snn

#endif  // EVPLANE_SNN_SNN_TRAIN_HPP
