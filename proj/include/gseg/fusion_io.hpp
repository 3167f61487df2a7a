#pragma once

#include "gseg/fusion_net.hpp"

#include <filesystem>

namespace gseg::nn {

// Model directory layout: manifest.json (layer specs, shapes, seed, blob
// name) plus a raw little-endian float32 blob holding, in manifest order,
// each layer's weights then its bias.
void save_model(const std::filesystem::path& dir, const FusionNet<float>& net,
                std::uint64_t seed);
FusionNet<float> load_model(const std::filesystem::path& dir, std::uint64_t* seed = nullptr);

struct TrainSample {
  Tensor<float> channels;  // (3, H, W): foreground prob, edge prob, box counts
  Mask target;
};

struct TrainResult {
  FusionNet<float> net;
  std::vector<double> losses;  // one entry per SGD step (batch mean loss)
};

/// Minibatch SGD with momentum and weight decay; batch indices are drawn
/// from the config seed, gradients accumulate in a fixed order, so a given
/// (seed, config) reproduces bitwise on a single thread. `jobs` parallelizes
/// per-sample backward passes within a batch without changing the result.
TrainResult train_fusion(const std::vector<TrainSample>& data, const FusionNetConfig& net_cfg,
                         const TrainConfig& cfg, int jobs = 1);

}  // namespace gseg::nn
