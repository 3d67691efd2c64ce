#ifndef EVPLANE_NN_TRAIN_HPP
#define EVPLANE_NN_TRAIN_HPP

#include "evplane/data/dataset.hpp"
#include "evplane/nn/adam.hpp"
#include "evplane/nn/dense_network.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace evplane::nn {

struct EpochSummary {
  int epoch = 0;
  double mean_loss = 0.0;
};

using DenseEpochHook = std::function<void(const EpochSummary&, const DenseNetworkd&)>;

/// Row order for `epoch` (1-based): a fresh permutation from a seed derived
/// from (cfg.seed, epoch).
std::vector<Eigen::Index> epoch_permutation(Eigen::Index n, std::uint64_t seed, int epoch);

/// Mini-batch Adam on softmax cross-entropy. The hook runs after every epoch.
DenseNetworkd train(DenseNetworkd net, const data::LabeledDataset& dataset,
                    const TrainingConfig& cfg, const DenseEpochHook& epoch_hook = {});

double mean_loss(const DenseNetworkd& net, const data::LabeledDataset& dataset);
double accuracy(const Labels& predicted, const Labels& truth);

}  // namespace evplane::nn

#endif  // EVPLANE_NN_TRAIN_HPP
