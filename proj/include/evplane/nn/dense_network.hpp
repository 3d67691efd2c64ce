#ifndef EVPLANE_NN_DENSE_NETWORK_HPP
#define EVPLANE_NN_DENSE_NETWORK_HPP

#include "evplane/common.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace evplane::nn {

template <typename Scalar>
struct DenseLayer {
  Matrix<Scalar> weight;  // (out x in)
  Vector<Scalar> bias;    // (out)
};

// One entry per affine layer; also used for gradients and optimizer moments.
template <typename Scalar>
using ParameterSet = std::vector<DenseLayer<Scalar>>;

/// Fully connected classifier: ReLU on every hidden layer, raw logits out.
/// layer_dims = (input, hidden..., classes); no hidden entries gives the
/// linear model.
template <typename Scalar>
struct DenseNetwork {
  std::vector<int> layer_dims;
  ParameterSet<Scalar> layers;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t layer_count() const { return layers.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
  }

  bool all_finite() const {
    for (const auto& l : layers)
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
  }
};

using DenseNetworkd = DenseNetwork<double>;

inline void validate_architecture(const std::vector<int>& dims) {
  if (dims.size() < 2)
    throw ArchitectureError("need at least input and output dimensions, got " +
                            std::to_string(dims.size()));
  for (int d : dims)
    if (d <= 0) throw ArchitectureError("layer dimensions must be positive");
}

template <typename Scalar>
ParameterSet<Scalar> zeros_like(const ParameterSet<Scalar>& params) {
  ParameterSet<Scalar> out(params.size());
  for (std::size_t l = 0; l < params.size(); ++l) {
    out[l].weight = Matrix<Scalar>::Zero(params[l].weight.rows(), params[l].weight.cols());
    out[l].bias = Vector<Scalar>::Zero(params[l].bias.size());
  }
  return out;
}

/// He-uniform weights (bound sqrt(6 / fan_in)) and zero biases.
template <typename Scalar = double>
DenseNetwork<Scalar> init_network(const std::vector<int>& layer_dims, std::uint64_t seed) {
  validate_architecture(layer_dims);
  DenseNetwork<Scalar> net;
  net.layer_dims = layer_dims;
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    const int fan_in = layer_dims[l];
    const int fan_out = layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer<Scalar> layer;
    layer.weight.resize(fan_out, fan_in);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i)
      layer.weight.data()[i] = static_cast<Scalar>(dist(rng));
    layer.bias = Vector<Scalar>::Zero(fan_out);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

template <typename Scalar>
struct ForwardTrace {
  Matrix<Scalar> input;
  std::vector<Matrix<Scalar>> pre;   // affine outputs per layer
  std::vector<Matrix<Scalar>> post;  // ReLU(pre) for hidden layers, pre for the last

  const Matrix<Scalar>& logits() const { return pre.back(); }
};

template <typename Scalar, typename Derived>
ForwardTrace<Scalar> forward(const DenseNetwork<Scalar>& net,
                             const Eigen::MatrixBase<Derived>& batch) {
  if (batch.cols() != net.input_dim())
    throw ShapeError("batch has " + std::to_string(batch.cols()) +
                     " columns, network expects " + std::to_string(net.input_dim()));
  ForwardTrace<Scalar> trace;
  trace.input = batch;
  const Matrix<Scalar>* a = &trace.input;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    Matrix<Scalar> z = (*a) * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    trace.pre.push_back(std::move(z));
    if (l + 1 < net.layers.size())
      trace.post.push_back(trace.pre.back().cwiseMax(Scalar(0)));
    else
      trace.post.push_back(trace.pre.back());
    a = &trace.post.back();
  }
  return trace;
}

/// Logits only, without keeping the per-layer trace.
template <typename Scalar, typename Derived>
Matrix<Scalar> logits(const DenseNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& batch) {
  if (batch.cols() != net.input_dim())
    throw ShapeError("batch has " + std::to_string(batch.cols()) +
                     " columns, network expects " + std::to_string(net.input_dim()));
  Matrix<Scalar> a = batch;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    Matrix<Scalar> z = a * net.layers[l].weight.transpose();
    z.rowwise() += net.layers[l].bias.transpose();
    if (l + 1 < net.layers.size()) z = z.cwiseMax(Scalar(0));
    a = std::move(z);
  }
  return a;
}

template <typename Scalar>
struct LossResult {
  Scalar loss;
  Matrix<Scalar> dlogits;
};

/// Mean softmax cross-entropy and its gradient with respect to the logits.
template <typename Scalar>
LossResult<Scalar> cross_entropy_loss(const Matrix<Scalar>& logits, const Labels& labels) {
  const Eigen::Index n = logits.rows();
  const Eigen::Index k = logits.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw ShapeError("label count does not match logit rows");
  if (n == 0) throw ShapeError("empty batch");
  LossResult<Scalar> out{Scalar(0), Matrix<Scalar>(n, k)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = labels[i];
    if (y < 0 || y >= k)
      throw LabelError("label " + std::to_string(y) + " outside [0, " + std::to_string(k) + ")");
    const Scalar shift = logits.row(i).maxCoeff();
    auto e = (logits.row(i).array() - shift).exp();
    const Scalar sum = e.sum();
    out.loss += std::log(sum) - (logits(i, y) - shift);
    out.dlogits.row(i) = e / sum;
    out.dlogits(i, y) -= Scalar(1);
  }
  out.loss /= static_cast<Scalar>(n);
  out.dlogits /= static_cast<Scalar>(n);
  return out;
}

/// Backpropagation through the trace; the ReLU derivative at exactly 0 is 0.
template <typename Scalar>
ParameterSet<Scalar> backward(const DenseNetwork<Scalar>& net, const ForwardTrace<Scalar>& trace,
                              const Matrix<Scalar>& dlogits) {
  const std::size_t depth = net.layers.size();
  if (trace.pre.size() != depth || trace.post.size() != depth)
    throw TraceError("trace depth does not match network");
  for (std::size_t l = 0; l < depth; ++l)
    if (trace.pre[l].cols() != net.layers[l].weight.rows() ||
        trace.pre[l].rows() != trace.input.rows())
      throw TraceError("trace layer " + std::to_string(l) + " has stale shape");
  if (trace.input.cols() != net.input_dim()) throw TraceError("trace input width is stale");
  if (dlogits.rows() != trace.input.rows() || dlogits.cols() != net.output_dim())
    throw TraceError("dlogits shape does not match trace");

  ParameterSet<Scalar> grads(depth);
  Matrix<Scalar> delta = dlogits;
  for (std::size_t l = depth; l-- > 0;) {
    const Matrix<Scalar>& a_prev = l == 0 ? trace.input : trace.post[l - 1];
    grads[l].weight = delta.transpose() * a_prev;
    grads[l].bias = delta.colwise().sum().transpose();
    if (l == 0) break;
    Matrix<Scalar> upstream = delta * net.layers[l].weight;
    delta = (trace.pre[l - 1].array() > Scalar(0)).select(upstream, Scalar(0));
  }
  return grads;
}

/// Row-wise argmax, ties resolved toward the smaller class index.
template <typename Derived>
Labels argmax_rows(const Eigen::MatrixBase<Derived>& scores) {
  Labels out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

template <typename Scalar, typename Derived>
Labels predict(const DenseNetwork<Scalar>& net, const Eigen::MatrixBase<Derived>& batch) {
  return argmax_rows(logits(net, batch));
}

}  // namespace evplane::nn

#endif  // EVPLANE_NN_DENSE_NETWORK_HPP
