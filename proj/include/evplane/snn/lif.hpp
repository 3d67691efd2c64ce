#ifndef EVPLANE_SNN_LIF_HPP
#define EVPLANE_SNN_LIF_HPP

#include "evplane/common.hpp"
#include "evplane/nn/adam.hpp"
#include "evplane/nn/dense_network.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace evplane::snn {

struct SNNConfig {
  double leak = 0.95;      // eta
  double threshold = 1.0;  // V_th
  int time_steps = 5;      // tau
  double surrogate_slope = 2.0;
  nn::TrainingConfig training;

  void validate() const {
    if (!(leak > 0.0 && leak < 1.0)) throw ConfigError("leak must lie in (0, 1)");
    if (!(threshold > 0.0) || !std::isfinite(threshold))
      throw ConfigError("threshold must be positive and finite");
    if (time_steps < 1) throw ConfigError("time_steps must be at least 1");
    if (!(surrogate_slope > 0.0)) throw ConfigError("surrogate_slope must be positive");
    training.validate();
  }
};

/// Spikes per time step: steps[t] is (batch x features), entries exactly 0 or 1.
struct SpikeTrainBatch {
  std::vector<MatrixXd> steps;

  Eigen::Index batch() const { return steps.empty() ? 0 : steps.front().rows(); }
  Eigen::Index dim() const { return steps.empty() ? 0 : steps.front().cols(); }
  int time_steps() const { return static_cast<int>(steps.size()); }
  double at(Eigen::Index sample, Eigen::Index feature, int t) const {
    return steps[static_cast<std::size_t>(t)](sample, feature);
  }
};

/// Poisson rate coding: S_i[t] ~ Bernoulli(x_i), i.i.d. over t.
template <typename Derived>
SpikeTrainBatch rate_encode(const Eigen::MatrixBase<Derived>& batch, int time_steps,
                            std::uint64_t seed) {
  if (time_steps < 1) throw EncodingError("time_steps must be at least 1");
  for (Eigen::Index i = 0; i < batch.rows(); ++i)
    for (Eigen::Index j = 0; j < batch.cols(); ++j) {
      const double x = static_cast<double>(batch(i, j));
      if (!(x >= 0.0 && x <= 1.0))
        throw EncodingError("feature (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") = " + std::to_string(x) + " outside [0, 1]");
    }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SpikeTrainBatch out;
  out.steps.reserve(static_cast<std::size_t>(time_steps));
  for (int t = 0; t < time_steps; ++t) {
    MatrixXd s(batch.rows(), batch.cols());
    for (Eigen::Index i = 0; i < s.rows(); ++i)
      for (Eigen::Index j = 0; j < s.cols(); ++j)
        s(i, j) = unif(rng) < static_cast<double>(batch(i, j)) ? 1.0 : 0.0;
    out.steps.push_back(std::move(s));
  }
  return out;
}

/// d/dU of 1/2 + atan(slope*pi*(U - V_th)/2)/pi; equals 1/(1 + pi^2 (U - V_th)^2)
/// at the default slope of 2.
template <typename Scalar>
Scalar surrogate_grad(Scalar potential, Scalar threshold, Scalar slope = Scalar(2)) {
  const Scalar a = slope * std::numbers::pi_v<Scalar> * (potential - threshold) / Scalar(2);
  return (slope / Scalar(2)) / (Scalar(1) + a * a);
}

enum class SpikeFunction {
  heaviside,      // S = [U >= V_th]; surrogate used only in the backward pass
  smooth_arctan,  // S = 1/2 + atan(...)/pi; the surrogate is then its exact derivative
};

template <typename Scalar>
struct LIFTrace {
  std::vector<Matrix<Scalar>> input;                  // S_0[t]
  std::vector<std::vector<Matrix<Scalar>>> potential;  // potential[l][t] = U_{l+1}[t+1]
  std::vector<std::vector<Matrix<Scalar>>> spikes;     // spikes[l][t]    = S_{l+1}[t+1]
  Matrix<Scalar> representation;                       // sum_t of the output-layer potential

  int time_steps() const { return static_cast<int>(input.size()); }
};

template <typename Scalar>
Matrix<Scalar> spike_fn(const Matrix<Scalar>& u, Scalar threshold, Scalar slope,
                        SpikeFunction fn) {
  if (fn == SpikeFunction::heaviside)
    return (u.array() >= threshold).template cast<Scalar>().matrix();
  return (Scalar(0.5) + ((slope * std::numbers::pi_v<Scalar> / Scalar(2)) *
                         (u.array() - threshold)).atan() / std::numbers::pi_v<Scalar>)
      .matrix();
}

/// U_l[t] = eta U_l[t-1] + W_{l-1} S_{l-1}[t] + b - V_th S_l[t-1], with
/// U_l[0] = 0 and S_l[0] = 0. Every layer, the output layer included, spikes
/// and resets.
template <typename Scalar>
LIFTrace<Scalar> lif_forward(const nn::DenseNetwork<Scalar>& net,
                             const std::vector<Matrix<Scalar>>& input_spikes,
                             const SNNConfig& cfg,
                             SpikeFunction fn = SpikeFunction::heaviside) {
  if (input_spikes.empty()) throw ShapeError("spike train has no time steps");
  const Eigen::Index batch = input_spikes.front().rows();
  for (const auto& s : input_spikes)
    if (s.cols() != net.input_dim() || s.rows() != batch)
      throw ShapeError("spike train shape does not match network input " +
                       std::to_string(net.input_dim()));
  const auto eta = static_cast<Scalar>(cfg.leak);
  const auto vth = static_cast<Scalar>(cfg.threshold);
  const auto slope = static_cast<Scalar>(cfg.surrogate_slope);
  const std::size_t tau = input_spikes.size();

  LIFTrace<Scalar> trace;
  trace.input = input_spikes;
  const std::vector<Matrix<Scalar>>* below = &trace.input;
  for (const auto& layer : net.layers) {
    const Eigen::Index width = layer.weight.rows();
    std::vector<Matrix<Scalar>> u_steps, s_steps;
    u_steps.reserve(tau);
    s_steps.reserve(tau);
    Matrix<Scalar> u = Matrix<Scalar>::Zero(batch, width);
    Matrix<Scalar> s_prev = Matrix<Scalar>::Zero(batch, width);
    for (std::size_t t = 0; t < tau; ++t) {
      Matrix<Scalar> current = (*below)[t] * layer.weight.transpose();
      current.rowwise() += layer.bias.transpose();
      u = eta * u + current - vth * s_prev;
      s_prev = spike_fn<Scalar>(u, vth, slope, fn);
      u_steps.push_back(u);
      s_steps.push_back(s_prev);
    }
    trace.potential.push_back(std::move(u_steps));
    trace.spikes.push_back(std::move(s_steps));
    below = &trace.spikes.back();
  }
  trace.representation = Matrix<Scalar>::Zero(batch, net.output_dim());
  for (const auto& u : trace.potential.back()) trace.representation += u;
  return trace;
}

template <typename Scalar>
LIFTrace<Scalar> lif_forward(const nn::DenseNetwork<Scalar>& net, const SpikeTrainBatch& spikes,
                             const SNNConfig& cfg,
                             SpikeFunction fn = SpikeFunction::heaviside) {
  std::vector<Matrix<Scalar>> steps;
  steps.reserve(spikes.steps.size());
  for (const auto& s : spikes.steps) steps.push_back(s.template cast<Scalar>());
  return lif_forward<Scalar>(net, steps, cfg, fn);
}

/// Backpropagation through time for logits = sum_t U_L[t]. The spike
/// derivative is the arctan surrogate; the reset path is differentiated too.
template <typename Scalar>
nn::ParameterSet<Scalar> lif_backward(const nn::DenseNetwork<Scalar>& net,
                                      const LIFTrace<Scalar>& trace,
                                      const Matrix<Scalar>& dlogits, const SNNConfig& cfg) {
  const std::size_t depth = net.layers.size();
  if (trace.potential.size() != depth || trace.spikes.size() != depth)
    throw TraceError("trace depth does not match network");
  const std::size_t tau = trace.input.size();
  const Eigen::Index batch = tau ? trace.input.front().rows() : 0;
  if (dlogits.rows() != batch || dlogits.cols() != net.output_dim())
    throw TraceError("dlogits shape does not match trace");
  for (std::size_t l = 0; l < depth; ++l)
    if (trace.potential[l].size() != tau || trace.potential[l].front().cols() != net.layers[l].weight.rows())
      throw TraceError("trace layer " + std::to_string(l) + " has stale shape");

  const auto eta = static_cast<Scalar>(cfg.leak);
  const auto vth = static_cast<Scalar>(cfg.threshold);
  const auto slope = static_cast<Scalar>(cfg.surrogate_slope);

  nn::ParameterSet<Scalar> grads = nn::zeros_like(net.layers);
  std::vector<Matrix<Scalar>> grad_u_above;  // dL/dU of layer l+1 at each t
  for (std::size_t l = depth; l-- > 0;) {
    const Eigen::Index width = net.layers[l].weight.rows();
    std::vector<Matrix<Scalar>> grad_u(tau);
    Matrix<Scalar> next_grad_u = Matrix<Scalar>::Zero(batch, width);
    for (std::size_t t = tau; t-- > 0;) {
      Matrix<Scalar> grad_s = -vth * next_grad_u;
      if (l + 1 < depth) grad_s += grad_u_above[t] * net.layers[l + 1].weight;
      const Matrix<Scalar> dspike = trace.potential[l][t].unaryExpr(
          [&](Scalar u) { return surrogate_grad<Scalar>(u, vth, slope); });
      Matrix<Scalar> g = eta * next_grad_u + grad_s.cwiseProduct(dspike);
      if (l + 1 == depth) g += dlogits;
      const Matrix<Scalar>& s_below = l == 0 ? trace.input[t] : trace.spikes[l - 1][t];
      grads[l].weight.noalias() += g.transpose() * s_below;
      grads[l].bias += g.colwise().sum().transpose();
      next_grad_u = g;
      grad_u[t] = std::move(g);
    }
    grad_u_above = std::move(grad_u);
  }
  return grads;
}

}  // namespace evplane::snn

#endif  // EVPLANE_SNN_LIF_HPP
