#include "gseg/synth.hpp"

#include "gseg/labelgen.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace gseg::synth {
namespace {

using Eigen::Index;
using nlohmann::json;

struct Gland {
  double cy, cx;        // center
  double a, b;          // semi-axes
  double cos_t, sin_t;  // orientation
  double jitter_amp;
  int jitter_lobes;
  double jitter_phase;
  bool lumen;

  // Elliptical radius of a pixel, relative to the jittered boundary at its
  // angle; <= 1 means inside.
  double rho(double y, double x) const {
    const double dy = y - cy, dx = x - cx;
    const double u = (dx * cos_t + dy * sin_t) / a;
    const double v = (-dx * sin_t + dy * cos_t) / b;
    const double r = std::hypot(u, v);
    const double phi = std::atan2(v, u);
    const double boundary = 1.0 + jitter_amp * std::sin(jitter_lobes * phi + jitter_phase);
    return r / boundary;
  }
};

// Low-frequency texture: bilinear upsampling of a coarse random grid.
PlaneF smooth_noise(Index h, Index w, Index cell, Rng& rng) {
  const Index gh = h / cell + 2, gw = w / cell + 2;
  PlaneF grid(gh, gw);
  for (Index y = 0; y < gh; ++y)
    for (Index x = 0; x < gw; ++x) grid(y, x) = float(rng.uniform());
  PlaneF out(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const double fy = double(y) / cell, fx = double(x) / cell;
      const Index y0 = Index(fy), x0 = Index(fx);
      const double ay = fy - y0, ax = fx - x0;
      out(y, x) = float(grid(y0, x0) * (1 - ay) * (1 - ax) + grid(y0, x0 + 1) * (1 - ay) * ax +
                        grid(y0 + 1, x0) * ay * (1 - ax) + grid(y0 + 1, x0 + 1) * ay * ax);
    }
  return out;
}

}  // namespace

void validate_synth_config(const SynthConfig& cfg) {
  if (cfg.image_size <= 0) throw ValidationError("synth: image_size must be positive");
  if (cfg.min_instances < 0 || cfg.max_instances < cfg.min_instances)
    throw ValidationError("synth: empty instance count range");
  if (!(cfg.min_axis > 0) || cfg.max_axis < cfg.min_axis)
    throw ValidationError("synth: empty axis range");
  if (cfg.lumen_probability < 0 || cfg.lumen_probability > 1)
    throw ValidationError("synth: lumen_probability must lie in [0,1]");
  if (cfg.boundary_jitter < 0 || cfg.boundary_jitter >= 1)
    throw ValidationError("synth: boundary_jitter must lie in [0,1)");
  if (cfg.min_gap < 0) throw ValidationError("synth: min_gap must be >= 0");
  if (cfg.ps_blur_sigma < 0 || cfg.ps_noise < 0 || cfg.pe_dilate_radius < 0 ||
      cfg.pd_jitter < 0)
    throw ValidationError("synth: noise levels must be >= 0");
  if (cfg.pe_dropout < 0 || cfg.pe_dropout > 1)
    throw ValidationError("synth: pe_dropout must lie in [0,1]");
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  SynthConfig cfg;
  cfg.image_size = j.value("image_size", cfg.image_size);
  cfg.min_instances = j.value("min_instances", cfg.min_instances);
  cfg.max_instances = j.value("max_instances", cfg.max_instances);
  cfg.min_axis = j.value("min_axis", cfg.min_axis);
  cfg.max_axis = j.value("max_axis", cfg.max_axis);
  cfg.lumen_probability = j.value("lumen_probability", cfg.lumen_probability);
  cfg.boundary_jitter = j.value("boundary_jitter", cfg.boundary_jitter);
  cfg.min_gap = j.value("min_gap", cfg.min_gap);
  cfg.ps_blur_sigma = j.value("ps_blur_sigma", cfg.ps_blur_sigma);
  cfg.ps_noise = j.value("ps_noise", cfg.ps_noise);
  cfg.pe_dilate_radius = j.value("pe_dilate_radius", cfg.pe_dilate_radius);
  cfg.pe_dropout = j.value("pe_dropout", cfg.pe_dropout);
  cfg.pd_jitter = j.value("pd_jitter", cfg.pd_jitter);
  cfg.seed = j.value("seed", cfg.seed);
  validate_synth_config(cfg);
  return cfg;
}

void save_synth_config(const std::filesystem::path& path, const SynthConfig& cfg) {
  const json j = {{"image_size", cfg.image_size},
                  {"min_instances", cfg.min_instances},
                  {"max_instances", cfg.max_instances},
                  {"min_axis", cfg.min_axis},
                  {"max_axis", cfg.max_axis},
                  {"lumen_probability", cfg.lumen_probability},
                  {"boundary_jitter", cfg.boundary_jitter},
                  {"min_gap", cfg.min_gap},
                  {"ps_blur_sigma", cfg.ps_blur_sigma},
                  {"ps_noise", cfg.ps_noise},
                  {"pe_dilate_radius", cfg.pe_dilate_radius},
                  {"pe_dropout", cfg.pe_dropout},
                  {"pd_jitter", cfg.pd_jitter},
                  {"seed", cfg.seed}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

SynthSample generate(const SynthConfig& cfg, std::uint64_t sample_index) {
  validate_synth_config(cfg);
  Rng rng(cfg.seed, sample_index);
  const Index n = cfg.image_size;

  const Index target = rng.uniform_int(cfg.min_instances, cfg.max_instances);
  std::vector<Gland> glands;
  InstanceMap z = InstanceMap::Zero(n, n);
  Mask blocked = Mask::Zero(n, n);  // foreground plus the min_gap guard ring

  const int attempts_budget = 40 * int(std::max<Index>(target, 1));
  int attempts = 0;
  while (Index(glands.size()) < target && attempts < attempts_budget) {
    ++attempts;
    Gland g;
    g.a = rng.uniform(cfg.min_axis, cfg.max_axis);
    g.b = rng.uniform(cfg.min_axis, cfg.max_axis);
    const double theta = rng.uniform(0.0, 3.141592653589793);
    g.cos_t = std::cos(theta);
    g.sin_t = std::sin(theta);
    g.jitter_amp = cfg.boundary_jitter > 0 ? rng.uniform(0.0, cfg.boundary_jitter) : 0.0;
    g.jitter_lobes = int(rng.uniform_int(3, 6));
    g.jitter_phase = rng.uniform(0.0, 6.283185307179586);
    g.lumen = rng.bernoulli(cfg.lumen_probability);
    const double reach = std::max(g.a, g.b) * (1.0 + g.jitter_amp);
    g.cy = rng.uniform(1.0, double(n) - 2.0);
    g.cx = rng.uniform(1.0, double(n) - 2.0);

    // Rasterize the candidate and test it against claimed territory.
    const Index y0 = std::max<Index>(0, Index(std::floor(g.cy - reach - cfg.min_gap)));
    const Index y1 = std::min<Index>(n - 1, Index(std::ceil(g.cy + reach + cfg.min_gap)));
    const Index x0 = std::max<Index>(0, Index(std::floor(g.cx - reach - cfg.min_gap)));
    const Index x1 = std::min<Index>(n - 1, Index(std::ceil(g.cx + reach + cfg.min_gap)));
    std::vector<Pixel> body;
    bool collides = false;
    for (Index y = y0; y <= y1 && !collides; ++y)
      for (Index x = x0; x <= x1; ++x) {
        if (g.rho(double(y), double(x)) > 1.0) continue;
        if (blocked(y, x)) {
          collides = true;
          break;
        }
        body.push_back({y, x});
      }
    if (collides || body.empty()) continue;

    const auto id = static_cast<std::int32_t>(glands.size() + 1);
    for (const Pixel& p : body) z(p.y, p.x) = id;
    // Claim the body plus its guard ring so neighbors keep min_gap distance.
    const Index guard = Index(std::ceil(cfg.min_gap));
    for (const Pixel& p : body)
      for (Index dy = -guard; dy <= guard; ++dy)
        for (Index dx = -guard; dx <= guard; ++dx) {
          const Index yy = p.y + dy, xx = p.x + dx;
          if (yy < 0 || yy >= n || xx < 0 || xx >= n) continue;
          if (double(dy) * dy + double(dx) * dx <= cfg.min_gap * cfg.min_gap + 1e-9)
            blocked(yy, xx) = 1;
        }
    glands.push_back(g);
  }
  if (Index(glands.size()) < cfg.min_instances)
    throw ValidationError("synth: could not pack " + std::to_string(cfg.min_instances) +
                          " instances into a " + std::to_string(n) + "px image");

  // Paint the scene: light stroma, pink cytoplasm, dark nuclear rim, pale lumen.
  SynthSample sample;
  sample.instances = std::move(z);
  const PlaneF texture = smooth_noise(n, n, 8, rng);
  PlaneF r(n, n), gr(n, n), b(n, n);
  for (Index y = 0; y < n; ++y)
    for (Index x = 0; x < n; ++x) {
      const float t = texture(y, x) - 0.5f;
      float cr = 0.85f + 0.10f * t, cg = 0.74f + 0.10f * t, cb = 0.83f + 0.10f * t;
      if (const std::int32_t id = sample.instances(y, x); id != 0) {
        const Gland& g = glands[std::size_t(id) - 1];
        const double rho = g.rho(double(y), double(x));
        if (rho >= 0.72) {  // nuclear rim
          cr = 0.42f + 0.06f * t;
          cg = 0.26f + 0.06f * t;
          cb = 0.52f + 0.06f * t;
        } else if (g.lumen && rho <= 0.38) {
          cr = 0.94f;
          cg = 0.92f;
          cb = 0.94f;
        } else {  // cytoplasm
          cr = 0.80f + 0.08f * t;
          cg = 0.58f + 0.08f * t;
          cb = 0.72f + 0.08f * t;
        }
      }
      const float grain = float(rng.uniform() - 0.5) * 0.04f;
      r(y, x) = std::clamp(cr + grain, 0.0f, 1.0f);
      gr(y, x) = std::clamp(cg + grain, 0.0f, 1.0f);
      b(y, x) = std::clamp(cb + grain, 0.0f, 1.0f);
    }
  sample.image.planes = {std::move(r), std::move(gr), std::move(b)};
  return sample;
}

PlaneF gaussian_blur(const PlaneF& plane, double sigma) {
  if (sigma <= 0) return plane;
  const Index radius = std::max<Index>(1, Index(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(std::size_t(2 * radius + 1));
  for (Index i = -radius; i <= radius; ++i)
    kernel[std::size_t(i + radius)] = std::exp(-double(i) * i / (2.0 * sigma * sigma));

  const Index h = plane.rows(), w = plane.cols();
  PlaneF tmp(h, w), out(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      double acc = 0, wsum = 0;
      for (Index k = -radius; k <= radius; ++k) {
        const Index xx = x + k;
        if (xx < 0 || xx >= w) continue;
        acc += kernel[std::size_t(k + radius)] * plane(y, xx);
        wsum += kernel[std::size_t(k + radius)];
      }
      tmp(y, x) = float(acc / wsum);
    }
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      double acc = 0, wsum = 0;
      for (Index k = -radius; k <= radius; ++k) {
        const Index yy = y + k;
        if (yy < 0 || yy >= h) continue;
        acc += kernel[std::size_t(k + radius)] * tmp(yy, x);
        wsum += kernel[std::size_t(k + radius)];
      }
      out(y, x) = float(acc / wsum);
    }
  return out;
}

Channels simulate_channels(const InstanceMap& z, const SynthConfig& cfg, Rng& rng) {
  validate_instance_map(z);
  Channels ch;

  // Foreground channel: the half-indicator offset keeps the 0.5 level set
  // exactly on the true foreground when noise is zero.
  const PlaneF indicator = (z != 0).cast<float>();
  ch.ps = 0.5f * indicator + 0.5f * gaussian_blur(indicator, cfg.ps_blur_sigma);
  if (cfg.ps_noise > 0) {
    for (Eigen::Index i = 0; i < ch.ps.size(); ++i)
      ch.ps.data()[i] =
          std::clamp(ch.ps.data()[i] + float(cfg.ps_noise * rng.normal()), 0.0f, 1.0f);
  }

  // Edge channel: dilated boundary mask with pixel dropout.
  Mask edges = labelgen::dilate_mask(labelgen::derive_edge_mask(z), cfg.pe_dilate_radius);
  if (cfg.pe_dropout > 0) {
    for (Eigen::Index i = 0; i < edges.size(); ++i)
      if (edges.data()[i] && rng.bernoulli(cfg.pe_dropout)) edges.data()[i] = 0;
  }
  ch.pe = edges.cast<float>();

  // Detection channel: box fill of jittered boxes, normalized by its max.
  std::vector<BoundingBox> boxes = labelgen::derive_boxes(z);
  if (cfg.pd_jitter > 0) {
    const auto j = Eigen::Index(cfg.pd_jitter);
    for (BoundingBox& box : boxes) {
      box.x_min = std::clamp<Eigen::Index>(box.x_min + rng.uniform_int(-j, j), 0, z.cols() - 1);
      box.x_max = std::clamp<Eigen::Index>(box.x_max + rng.uniform_int(-j, j), box.x_min,
                                           z.cols() - 1);
      box.y_min = std::clamp<Eigen::Index>(box.y_min + rng.uniform_int(-j, j), 0, z.rows() - 1);
      box.y_max = std::clamp<Eigen::Index>(box.y_max + rng.uniform_int(-j, j), box.y_min,
                                           z.rows() - 1);
    }
  }
  const PlaneI counts = labelgen::fill_boxes(boxes, z.rows(), z.cols());
  const std::int32_t peak = counts.size() > 0 ? counts.maxCoeff() : 0;
  ch.pd = peak > 0 ? PlaneF(counts.cast<float>() / float(peak))
                   : PlaneF(PlaneF::Zero(z.rows(), z.cols()));
  return ch;
}

}  // namespace gseg::synth
