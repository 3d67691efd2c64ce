#ifndef EVPLANE_NN_ADAM_HPP
#define EVPLANE_NN_ADAM_HPP

#include "evplane/nn/dense_network.hpp"

#include <cmath>
#include <cstdint>

namespace evplane::nn {

struct TrainingConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int epochs = 50;
  int batch_size = 64;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in (0, 1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in (0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
  }
};

template <typename Scalar>
struct AdamState {
  ParameterSet<Scalar> first_moment;
  ParameterSet<Scalar> second_moment;
  std::int64_t step_count = 0;

  static AdamState for_network(const DenseNetwork<Scalar>& net) {
    return {zeros_like(net.layers), zeros_like(net.layers), 0};
  }
};

/// Bias-corrected Adam update, in place. A non-finite gradient or a
/// non-finite parameter after the update raises OptimizerError and leaves
/// the network as it was.
template <typename Scalar>
void adam_step(DenseNetwork<Scalar>& net, const ParameterSet<Scalar>& grads,
               AdamState<Scalar>& state, const TrainingConfig& cfg) {
  const std::size_t depth = net.layers.size();
  if (grads.size() != depth || state.first_moment.size() != depth ||
      state.second_moment.size() != depth)
    throw ShapeError("optimizer state does not mirror the network");
  for (std::size_t l = 0; l < depth; ++l) {
    if (grads[l].weight.rows() != net.layers[l].weight.rows() ||
        grads[l].weight.cols() != net.layers[l].weight.cols() ||
        grads[l].bias.size() != net.layers[l].bias.size())
      throw ShapeError("gradient shape mismatch at layer " + std::to_string(l));
    if (!grads[l].weight.allFinite() || !grads[l].bias.allFinite())
      throw OptimizerError("non-finite gradient at layer " + std::to_string(l));
  }

  const Scalar b1 = static_cast<Scalar>(cfg.beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.beta2);
  const auto t = static_cast<Scalar>(state.step_count + 1);
  const Scalar c1 = Scalar(1) - std::pow(b1, t);
  const Scalar c2 = Scalar(1) - std::pow(b2, t);
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar eps = static_cast<Scalar>(cfg.epsilon);

  DenseNetwork<Scalar> updated = net;
  AdamState<Scalar> next = state;
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseProduct(g);
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t l = 0; l < depth; ++l) {
    update(updated.layers[l].weight, next.first_moment[l].weight, next.second_moment[l].weight,
           grads[l].weight);
    update(updated.layers[l].bias, next.first_moment[l].bias, next.second_moment[l].bias,
           grads[l].bias);
  }
  if (!updated.all_finite()) throw OptimizerError("parameters became non-finite");
  ++next.step_count;
  net = std::move(updated);
  state = std::move(next);
}

}  // namespace evplane::nn

#endif  // EVPLANE_NN_ADAM_HPP
