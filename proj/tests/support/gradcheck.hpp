// Central finite differences against the analytic gradients. The perturbed
// losses come from the oracle forward passes.
#ifndef EVPLANE_TESTS_GRADCHECK_HPP
#define EVPLANE_TESTS_GRADCHECK_HPP

#include "bridge.hpp"
#include "oracles.hpp"

#include "evplane/snn/lif.hpp"

namespace gradcheck {

using evplane::MatrixXd;
using evplane::nn::DenseNetworkd;
using evplane::nn::ParameterSet;

/// Calls fn(value&) on every weight, then every bias, layer by layer.
template <typename Params, typename Fn>
void for_each_parameter(Params& layers, Fn&& fn) {
  for (auto& layer : layers) {
    for (Eigen::Index j = 0; j < layer.weight.size(); ++j) fn(layer.weight.data()[j]);
    for (Eigen::Index j = 0; j < layer.bias.size(); ++j) fn(layer.bias.data()[j]);
  }
}

/// ||a - n|| / (||a|| + ||n||) over every parameter.
inline double relative_error(const ParameterSet<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  std::size_t i = 0;
  for_each_parameter(analytic, [&](const double& a) {
    const double n = numeric[i++];
    diff += (a - n) * (a - n);
    na += a * a;
    nn += n * n;
  });
  return std::sqrt(diff) / std::max(std::sqrt(na) + std::sqrt(nn), 1e-300);
}

template <typename Loss>
std::vector<double> numeric_gradient(DenseNetworkd net, const Loss& loss, double h) {
  std::vector<double> out;
  for_each_parameter(net.layers, [&](double& w) {
    const double keep = w;
    w = keep + h;
    const double up = loss(net);
    w = keep - h;
    const double down = loss(net);
    w = keep;
    out.push_back((up - down) / (2.0 * h));
  });
  return out;
}

/// One random ReLU-MLP instance; returns the relative gradient error.
inline double dense_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> width(2, 6), depth(1, 3), batch_size(1, 5);
  std::vector<int> dims{width(rng)};
  const int hidden = depth(rng);
  for (int l = 0; l < hidden; ++l) dims.push_back(width(rng));
  dims.push_back(width(rng));
  const auto net = bridge::random_network(dims, rng);
  const int batch = batch_size(rng);
  std::normal_distribution<double> normal;
  MatrixXd x(batch, dims.front());
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  evplane::Labels y(static_cast<std::size_t>(batch));
  std::uniform_int_distribution<int> label(0, dims.back() - 1);
  for (int& v : y) v = label(rng);

  const auto trace = evplane::nn::forward(net, x);
  const auto loss = evplane::nn::cross_entropy_loss(trace.logits(), y);
  const auto analytic = evplane::nn::backward(net, trace, loss.dlogits);

  const auto numeric = numeric_gradient(
      net,
      [&](const DenseNetworkd& n) {
        const auto layers = bridge::layers_of(n);
        double s = 0.0;
        for (int i = 0; i < batch; ++i)
          s += oracle::cross_entropy(oracle::mlp_logits(layers, bridge::row_of(x, i)),
                                     y[static_cast<std::size_t>(i)]);
        return s / batch;
      },
      1e-6);
  return relative_error(analytic, numeric);
}

/// One random LIF instance under the smooth spike function, so that BPTT
/// with the surrogate is the exact gradient.
inline double snn_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> width(1, 4), depth(0, 2), steps(1, 6), batch_size(1, 3);
  std::vector<int> dims{width(rng)};
  const int hidden = depth(rng);
  for (int l = 0; l < hidden; ++l) dims.push_back(width(rng));
  dims.push_back(width(rng) + 1);
  const auto net = bridge::random_network(dims, rng, 1.5);
  const int tau = steps(rng), batch = batch_size(rng);
  evplane::snn::SNNConfig cfg;
  std::uniform_real_distribution<double> unif;
  cfg.leak = 0.5 + 0.49 * unif(rng);
  cfg.threshold = 0.5 + unif(rng);

  std::bernoulli_distribution coin(0.5);
  std::vector<MatrixXd> spikes;
  for (int t = 0; t < tau; ++t) {
    MatrixXd s(batch, dims.front());
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = coin(rng) ? 1.0 : 0.0;
    spikes.push_back(s);
  }
  evplane::Labels y(static_cast<std::size_t>(batch));
  std::uniform_int_distribution<int> label(0, dims.back() - 1);
  for (int& v : y) v = label(rng);

  using evplane::snn::SpikeFunction;
  const auto trace = evplane::snn::lif_forward<double>(net, spikes, cfg, SpikeFunction::smooth_arctan);
  const auto loss = evplane::nn::cross_entropy_loss(trace.representation, y);
  const auto analytic = evplane::snn::lif_backward(net, trace, loss.dlogits, cfg);

  const auto numeric = numeric_gradient(
      net,
      [&](const DenseNetworkd& n) {
        const auto layers = bridge::layers_of(n);
        double s = 0.0;
        for (int i = 0; i < batch; ++i) {
          std::vector<oracle::Vec> in;
          for (int t = 0; t < tau; ++t) in.push_back(bridge::row_of(spikes[static_cast<std::size_t>(t)], i));
          const auto out = oracle::lif_unrolled(layers, in, cfg.leak, cfg.threshold, true,
                                                cfg.surrogate_slope);
          s += oracle::cross_entropy(out.summed, y[static_cast<std::size_t>(i)]);
        }
        return s / batch;
      },
      1e-6);
  return relative_error(analytic, numeric);
}

}  // namespace gradcheck

#endif  // EVPLANE_TESTS_GRADCHECK_HPP
