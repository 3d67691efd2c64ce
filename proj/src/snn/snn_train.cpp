#include "evplane/snn/snn_train.hpp"

#include "evplane/nn/snapshot.hpp"

#include <algorithm>
#include <fstream>

namespace evplane::snn {

nn::DenseNetworkd snn_train(nn::DenseNetworkd net, const data::LabeledDataset& dataset,
                            const SNNConfig& cfg, const SpikingEpochHook& epoch_hook) {
  cfg.validate();
  if (dataset.size() == 0) throw ShapeError("training set is empty");
  if (dataset.dim() != net.input_dim())
    throw ShapeError("dataset dimension does not match network input");

  const auto& tc = cfg.training;
  auto state = nn::AdamState<double>::for_network(net);
  const Eigen::Index n = dataset.size();
  const std::uint64_t encode_root = derive_seed(tc.seed, 0x5350494bULL);  // "SPIK"
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    const auto order = nn::epoch_permutation(n, tc.seed, epoch);
    const std::uint64_t epoch_seed = derive_seed(encode_root, static_cast<std::uint64_t>(epoch));
    double loss_sum = 0.0;
    std::uint64_t batch_index = 0;
    for (Eigen::Index start = 0; start < n; start += tc.batch_size, ++batch_index) {
      const Eigen::Index stop = std::min<Eigen::Index>(n, start + tc.batch_size);
      std::vector<Eigen::Index> rows(order.begin() + start, order.begin() + stop);
      const MatrixXd batch = data::gather_rows(dataset.features, rows);
      Labels y;
      y.reserve(rows.size());
      for (Eigen::Index r : rows) y.push_back(dataset.labels[static_cast<std::size_t>(r)]);

      const auto spikes = rate_encode(batch, cfg.time_steps, derive_seed(epoch_seed, batch_index));
      const auto trace = lif_forward<double>(net, spikes, cfg);
      const auto loss = nn::cross_entropy_loss(trace.representation, y);
      const auto grads = lif_backward<double>(net, trace, loss.dlogits, cfg);
      nn::adam_step(net, grads, state, tc);
      loss_sum += loss.loss * static_cast<double>(stop - start);
    }
    if (epoch_hook) epoch_hook({epoch, loss_sum / static_cast<double>(n)}, net);
  }
  return net;
}

MatrixXd snn_logits(const nn::DenseNetworkd& net, const MatrixXd& features, const SNNConfig& cfg,
                    std::uint64_t seed) {
  constexpr Eigen::Index kChunk = 2048;
  MatrixXd out(features.rows(), net.output_dim());
  std::uint64_t chunk_index = 0;
  for (Eigen::Index start = 0; start < features.rows(); start += kChunk, ++chunk_index) {
    const Eigen::Index rows = std::min(kChunk, features.rows() - start);
    const auto spikes =
        rate_encode(features.middleRows(start, rows), cfg.time_steps, derive_seed(seed, chunk_index));
    out.middleRows(start, rows) = lif_forward<double>(net, spikes, cfg).representation;
  }
  return out;
}

void write_snapshot(const SpikingNetwork& net, std::ostream& out) {
  using namespace nn::wire;
  put_magic(out, nn::kSpikingMagic);
  put_u16(out, nn::kSnapshotVersion);
  put_f64(out, net.config.leak);
  put_f64(out, net.config.threshold);
  put_u32(out, static_cast<std::uint32_t>(net.config.time_steps));
  put_f64(out, net.config.surrogate_slope);
  put_layers(out, net.weights);
}

SpikingNetwork read_spiking_snapshot(std::istream& in) {
  using namespace nn::wire;
  expect_magic(in, nn::kSpikingMagic);
  const auto version = get_u16(in);
  if (version != nn::kSnapshotVersion)
    throw IngestionError("unsupported snapshot version " + std::to_string(version));
  SpikingNetwork net;
  net.config.leak = get_f64(in);
  net.config.threshold = get_f64(in);
  net.config.time_steps = static_cast<int>(get_u32(in));
  net.config.surrogate_slope = get_f64(in);
  net.weights = get_layers(in);
  return net;
}

void save_snapshot(const SpikingNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestionError("cannot open " + path);
  write_snapshot(net, out);
}

SpikingNetwork load_spiking_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path);
  return read_spiking_snapshot(in);
}

}  // namespace evplane::snn
