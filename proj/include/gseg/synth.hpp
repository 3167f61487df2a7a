#pragma once

#include "gseg/rng.hpp"
#include "gseg/types.hpp"

#include <filesystem>

namespace gseg::synth {

struct SynthConfig {
  Eigen::Index image_size = 64;
  Eigen::Index min_instances = 2;
  Eigen::Index max_instances = 5;
  double min_axis = 5.0;   // ellipse semi-axes, pixels
  double max_axis = 11.0;
  double lumen_probability = 0.6;
  double boundary_jitter = 0.15;  // radial modulation amplitude
  double min_gap = 2.0;           // closest allowed spacing between glands, pixels

  double ps_blur_sigma = 1.6;  // foreground channel smoothing
  double ps_noise = 0.12;      // additive gaussian noise on the foreground channel
  double pe_dilate_radius = 1.0;
  double pe_dropout = 0.25;  // probability an edge pixel is dropped
  double pd_jitter = 2.0;    // box edge jitter, pixels

  std::uint64_t seed = 0;
};

void validate_synth_config(const SynthConfig& cfg);

SynthConfig load_synth_config(const std::filesystem::path& path);
void save_synth_config(const std::filesystem::path& path, const SynthConfig& cfg);

struct SynthSample {
  RawImage image;      // 3-channel, loosely H&E-tinted
  InstanceMap instances;
};

/// Deterministic gland-like scene: non-overlapping jittered ellipses with a
/// darker rim and optional lumen on a textured background. Identical
/// (config, sample_index) gives identical output. Throws when the requested
/// minimum instance count cannot be packed.
SynthSample generate(const SynthConfig& cfg, std::uint64_t sample_index);

struct Channels {
  PlaneF ps;  // blurred foreground indicator + noise, in [0,1]
  PlaneF pe;  // dilated edge mask with dropout, in {0,1}
  PlaneF pd;  // jittered box-count map, normalized to [0,1]
};

/// Noisy surrogates for the segmentation / edge / detection channel outputs
/// that the fusion net consumes. With all noise at zero, ps thresholded at
/// 0.5 recovers the foreground exactly and pd equals the normalized box
/// fill of the derived boxes.
Channels simulate_channels(const InstanceMap& z, const SynthConfig& cfg, Rng& rng);

/// Separable gaussian blur; borders renormalize by the in-bounds weight.
PlaneF gaussian_blur(const PlaneF& plane, double sigma);

}  // namespace gseg::synth
