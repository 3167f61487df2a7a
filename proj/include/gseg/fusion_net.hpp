#pragma once

#include "gseg/nn_ops.hpp"
#include "gseg/rng.hpp"

#include <cmath>
#include <vector>

namespace gseg::nn {

struct ConvLayerSpec {
  Eigen::Index in_channels = 0;
  Eigen::Index out_channels = 0;
  Eigen::Index dilation = 1;
  bool relu = true;
};

struct FusionNetConfig {
  std::vector<ConvLayerSpec> layers;
};

/// Seven 3x3 layers, dilations (1,1,2,2,4,1,1), ReLU between layers and a
/// two-channel head; receptive field 23x23 with no downsampling anywhere.
inline FusionNetConfig default_fusion_config(Eigen::Index in_channels = 3) {
  FusionNetConfig cfg;
  const Eigen::Index widths[8] = {in_channels, 32, 32, 64, 64, 64, 32, 2};
  const Eigen::Index dilations[7] = {1, 1, 2, 2, 4, 1, 1};
  for (int i = 0; i < 7; ++i)
    cfg.layers.push_back({widths[i], widths[i + 1], dilations[i], i < 6});
  return cfg;
}

inline void validate_fusion_config(const FusionNetConfig& cfg) {
  if (cfg.layers.empty()) throw ValidationError("fusion net: needs at least one layer");
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    const ConvLayerSpec& layer = cfg.layers[i];
    if (layer.in_channels <= 0 || layer.out_channels <= 0)
      throw ValidationError("fusion net: channel counts must be positive");
    if (layer.dilation < 1) throw ValidationError("fusion net: dilation must be >= 1");
    if (i > 0 && layer.in_channels != cfg.layers[i - 1].out_channels)
      throw ValidationError("fusion net: layer channel counts do not chain");
  }
  if (cfg.layers.back().out_channels != 2)
    throw ValidationError("fusion net: final layer must output 2 channels");
}

template <typename Scalar>
struct FusionNet {
  FusionNetConfig config;
  std::vector<Tensor<Scalar>> weights;  // (out, in, 3, 3) per layer
  std::vector<ArrayX<Scalar>> biases;   // (out) per layer

  Eigen::Index input_channels() const { return config.layers.front().in_channels; }

  Eigen::Index parameter_count() const {
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) n += weights[i].size() + biases[i].size();
    return n;
  }

  template <typename S2>
  FusionNet<S2> cast() const {
    FusionNet<S2> out;
    out.config = config;
    for (const auto& w : weights) out.weights.push_back(w.template cast<S2>());
    for (const auto& b : biases) out.biases.push_back(b.template cast<S2>());
    return out;
  }
};

/// Xavier-uniform initialization, every draw pinned to (seed).
template <typename Scalar>
FusionNet<Scalar> xavier_init(const FusionNetConfig& cfg, std::uint64_t seed) {
  validate_fusion_config(cfg);
  FusionNet<Scalar> net;
  net.config = cfg;
  Rng rng(seed);
  for (const ConvLayerSpec& layer : cfg.layers) {
    Tensor<Scalar> w({layer.out_channels, layer.in_channels, 3, 3});
    const double fan_in = double(layer.in_channels) * 9;
    const double fan_out = double(layer.out_channels) * 9;
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w.data()[i] = Scalar(rng.uniform(-bound, bound));
    net.weights.push_back(std::move(w));
    net.biases.push_back(ArrayX<Scalar>::Zero(layer.out_channels));
  }
  return net;
}

/// Pre-activation outputs of every layer, for backpropagation.
template <typename Scalar>
struct ForwardTrace {
  std::vector<Tensor<Scalar>> pre_activation;
};

template <typename Scalar>
Tensor<Scalar> forward_logits(const FusionNet<Scalar>& net, const Tensor<Scalar>& input,
                              ForwardTrace<Scalar>* trace = nullptr) {
  if (input.rank() != 3 || input.extent(0) != net.input_channels())
    throw ValidationError("fusion net: input channel count mismatch");
  Tensor<Scalar> x = input;
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    Tensor<Scalar> z =
        conv2d_dilated(x, net.weights[i], net.biases[i], net.config.layers[i].dilation);
    if (trace) trace->pre_activation.push_back(z);
    if (net.config.layers[i].relu) z.flat() = z.flat().max(Scalar(0));
    x = std::move(z);
  }
  return x;
}

/// Per-pixel class distribution over the two output channels.
template <typename Scalar>
Tensor<Scalar> forward(const FusionNet<Scalar>& net, const Tensor<Scalar>& input) {
  return softmax_channels(forward_logits(net, input));
}

template <typename Scalar>
struct Gradients {
  std::vector<Tensor<Scalar>> weights;
  std::vector<ArrayX<Scalar>> biases;

  static Gradients zeros_like(const FusionNet<Scalar>& net) {
    Gradients g;
    for (const auto& w : net.weights) g.weights.push_back(Tensor<Scalar>::zeros_like(w));
    for (const auto& b : net.biases) g.biases.push_back(ArrayX<Scalar>::Zero(b.size()));
    return g;
  }

  void add_scaled(const Gradients& other, Scalar scale) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i].flat() += scale * other.weights[i].flat();
      biases[i] += scale * other.biases[i];
    }
  }
};

/// Cross-entropy loss of the softmax head plus exact analytic gradients for
/// every weight and bias.
template <typename Scalar>
Scalar backward(const FusionNet<Scalar>& net, const Tensor<Scalar>& input, const Mask& target,
                Gradients<Scalar>& grads) {
  ForwardTrace<Scalar> trace;
  const Tensor<Scalar> logits = forward_logits(net, input, &trace);
  LossGrad<Scalar> head = softmax_xent(logits, target);

  grads.weights.assign(net.weights.size(), {});
  grads.biases.assign(net.biases.size(), {});
  Tensor<Scalar> grad = std::move(head.grad);
  for (std::size_t i = net.weights.size(); i-- > 0;) {
    // The stored tensor is pre-activation; the layer input is the previous
    // layer's post-activation (or the network input).
    Tensor<Scalar> layer_input;
    if (i == 0) {
      layer_input = input;
    } else {
      layer_input = trace.pre_activation[i - 1];
      if (net.config.layers[i - 1].relu)
        layer_input.flat() = layer_input.flat().max(Scalar(0));
    }
    if (net.config.layers[i].relu)
      grad.flat() *= (trace.pre_activation[i].flat() > Scalar(0)).template cast<Scalar>();
    Tensor<Scalar> grad_in;
    conv2d_dilated_backward(layer_input, net.weights[i], grad, net.config.layers[i].dilation,
                            i > 0 ? &grad_in : nullptr, &grads.weights[i], &grads.biases[i]);
    grad = std::move(grad_in);
  }
  return head.loss;
}

struct TrainConfig {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  double weight_decay = 0.002;
  Eigen::Index iterations = 1000;
  Eigen::Index batch_size = 1;
  std::uint64_t seed = 0;
};

inline void validate_train_config(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0)) throw ValidationError("train: learning_rate must be positive");
  if (cfg.momentum < 0 || cfg.momentum >= 1)
    throw ValidationError("train: momentum must lie in [0, 1)");
  if (cfg.weight_decay < 0) throw ValidationError("train: weight_decay must be >= 0");
  if (cfg.iterations <= 0 || cfg.batch_size <= 0)
    throw ValidationError("train: iterations and batch_size must be positive");
}

/// v <- momentum*v + lr*(grad + weight_decay*param); param <- param - v.
template <typename Scalar>
void sgd_step(FusionNet<Scalar>& net, Gradients<Scalar>& velocity,
              const Gradients<Scalar>& grads, const TrainConfig& cfg) {
  validate_train_config(cfg);
  const Scalar lr = Scalar(cfg.learning_rate);
  const Scalar mu = Scalar(cfg.momentum);
  const Scalar wd = Scalar(cfg.weight_decay);
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    if (!velocity.weights[i].same_shape(grads.weights[i]) ||
        velocity.biases[i].size() != grads.biases[i].size())
      throw ValidationError("sgd_step: parameter/velocity/gradient shapes disagree");
    velocity.weights[i].flat() =
        mu * velocity.weights[i].flat() +
        lr * (grads.weights[i].flat() + wd * net.weights[i].flat());
    net.weights[i].flat() -= velocity.weights[i].flat();
    velocity.biases[i] = mu * velocity.biases[i] + lr * (grads.biases[i] + wd * net.biases[i]);
    net.biases[i] -= velocity.biases[i];
  }
}

/// Loss evaluated with no gradient bookkeeping.
template <typename Scalar>
Scalar loss_only(const FusionNet<Scalar>& net, const Tensor<Scalar>& input, const Mask& target) {
  const Tensor<Scalar> logits = forward_logits(net, input);
  const Tensor<Scalar> probs = softmax_channels(logits);
  double loss = 0;
  for (Eigen::Index y = 0; y < target.rows(); ++y)
    for (Eigen::Index x = 0; x < target.cols(); ++x)
      loss -= std::log(double(probs.plane(target(y, x))(y, x)));
  return Scalar(loss / double(target.size()));
}

/// Central-difference verification of backward, parameter by parameter.
/// Returns the largest |analytic - numeric| scaled by the largest gradient
/// magnitude encountered, so a wrong gradient of any significant parameter
/// shows up at full size.
template <typename Scalar>
double grad_check(const FusionNet<Scalar>& net, const Tensor<Scalar>& input, const Mask& target,
                  double epsilon) {
  if (!(epsilon > 0)) throw ValidationError("grad_check: epsilon must be positive");

  Gradients<Scalar> grads;
  FusionNet<Scalar> probe = net;
  backward(probe, input, target, grads);

  double max_abs_err = 0, scale = 0;
  for (std::size_t i = 0; i < probe.weights.size(); ++i) {
    const auto check_param = [&](Scalar& value, double analytic) {
      const Scalar saved = value;
      value = saved + Scalar(epsilon);
      const double up = double(loss_only(probe, input, target));
      value = saved - Scalar(epsilon);
      const double down = double(loss_only(probe, input, target));
      value = saved;
      const double numeric = (up - down) / (2 * epsilon);
      max_abs_err = std::max(max_abs_err, std::abs(analytic - numeric));
      scale = std::max({scale, std::abs(analytic), std::abs(numeric)});
    };
    for (Eigen::Index p = 0; p < probe.weights[i].size(); ++p)
      check_param(probe.weights[i].data()[p], double(grads.weights[i].data()[p]));
    for (Eigen::Index p = 0; p < probe.biases[i].size(); ++p)
      check_param(probe.biases[i][p], double(grads.biases[i][p]));
  }
  return max_abs_err / std::max(scale, 1e-12);
}

}  // namespace gseg::nn
