#include "evplane/nn/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace evplane::nn {

std::vector<Eigen::Index> epoch_permutation(Eigen::Index n, std::uint64_t seed, int epoch) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(epoch)));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

DenseNetworkd train(DenseNetworkd net, const data::LabeledDataset& dataset,
                    const TrainingConfig& cfg, const DenseEpochHook& epoch_hook) {
  cfg.validate();
  if (dataset.size() == 0) throw ShapeError("training set is empty");
  if (dataset.dim() != net.input_dim())
    throw ShapeError("dataset dimension " + std::to_string(dataset.dim()) +
                     " does not match network input " + std::to_string(net.input_dim()));

  auto state = AdamState<double>::for_network(net);
  const Eigen::Index n = dataset.size();
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto order = epoch_permutation(n, cfg.seed, epoch);
    double loss_sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index stop = std::min<Eigen::Index>(n, start + cfg.batch_size);
      std::vector<Eigen::Index> rows(order.begin() + start, order.begin() + stop);
      MatrixXd batch = data::gather_rows(dataset.features, rows);
      Labels y;
      y.reserve(rows.size());
      for (Eigen::Index r : rows) y.push_back(dataset.labels[static_cast<std::size_t>(r)]);

      const auto trace = forward(net, batch);
      const auto loss = cross_entropy_loss(trace.logits(), y);
      const auto grads = backward(net, trace, loss.dlogits);
      adam_step(net, grads, state, cfg);
      loss_sum += loss.loss * static_cast<double>(stop - start);
    }
    if (epoch_hook) epoch_hook({epoch, loss_sum / static_cast<double>(n)}, net);
  }
  return net;
}

double mean_loss(const DenseNetworkd& net, const data::LabeledDataset& dataset) {
  return cross_entropy_loss<double>(logits(net, dataset.features), dataset.labels).loss;
}

double accuracy(const Labels& predicted, const Labels& truth) {
  if (predicted.size() != truth.size() || truth.empty())
    throw EvaluationError("prediction and label counts differ or are empty");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace evplane::nn
