#include "commands.hpp"

#include "gseg/augment.hpp"
#include "gseg/formats.hpp"
#include "gseg/labelgen.hpp"
#include "gseg/parallel.hpp"
#include "gseg/png_io.hpp"
#include "gseg/synth.hpp"

#include <iostream>

namespace gseg::cli {
namespace {

namespace fs = std::filesystem;

struct DeriveOpts {
  std::string in_path, out_dir, config_path;
  double edge_radius = 3.0;
  std::string edge_border = "replicate";
};

void run_derive(const DeriveOpts& opts, const CLI::App& cmd, const GlobalOpts& global) {
  DeriveOpts o = opts;
  if (!o.config_path.empty()) {
    const json cfg = load_json_file(o.config_path);
    config_default(cmd, cfg, "--edge-radius", "edge_radius", o.edge_radius);
    config_default(cmd, cfg, "--edge-border", "edge_border", o.edge_border);
  }
  labelgen::EdgeBorder border;
  if (o.edge_border == "replicate") border = labelgen::EdgeBorder::kReplicate;
  else if (o.edge_border == "background") border = labelgen::EdgeBorder::kBackground;
  else throw ValidationError("derive: --edge-border must be replicate or background");

  const InstanceMap z = load_instance_png(o.in_path);
  const Mask edges = labelgen::dilate_mask(labelgen::derive_edge_mask(z, border), o.edge_radius);
  const std::vector<BoundingBox> boxes = labelgen::derive_boxes(z);
  const PlaneI counts = labelgen::fill_boxes(boxes, z.rows(), z.cols());

  fs::create_directories(o.out_dir);
  const std::string stem = fs::path(o.in_path).stem().string();
  const fs::path edge_path = fs::path(o.out_dir) / (stem + "_edge.png");
  const fs::path boxes_path = fs::path(o.out_dir) / (stem + "_boxes.json");
  const fs::path count_path = fs::path(o.out_dir) / (stem + "_boxcount.png");
  save_mask_png(edge_path, edges);
  save_boxes_json(boxes_path, boxes);
  save_instance_png(count_path, counts);  // counts fit the same 16-bit encoding

  RunManifest manifest("derive",
                       {{"in", o.in_path},
                        {"edge_radius", o.edge_radius},
                        {"edge_border", o.edge_border}},
                       0);
  manifest.add_input(o.in_path);
  manifest.add_output(edge_path);
  manifest.add_output(boxes_path);
  manifest.add_output(count_path);
  manifest.write(o.out_dir);
  if (global.verbose)
    std::cerr << "derive: " << boxes.size() << " boxes from " << o.in_path << "\n";
}

struct SynthOpts {
  std::string out_dir, config_path;
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

void run_synth(const SynthOpts& opts, const CLI::App& cmd, const GlobalOpts& global) {
  synth::SynthConfig cfg;
  if (!opts.config_path.empty()) cfg = synth::load_synth_config(opts.config_path);
  if (cmd.count("--seed") > 0) cfg.seed = opts.seed;
  if (global.seed) cfg.seed = *global.seed;
  synth::validate_synth_config(cfg);

  fs::create_directories(opts.out_dir);
  json samples = json::array();
  std::vector<json> entries(opts.count);
  parallel_for(opts.count, global.jobs, [&](std::size_t i) {
    char name[32];
    std::snprintf(name, sizeof name, "s%04zu", i);
    const synth::SynthSample sample = synth::generate(cfg, i);
    // Channel noise draws come from a stream disjoint from generate's.
    Rng rng(cfg.seed, 0x80000000ULL + i);
    const synth::Channels ch = synth::simulate_channels(sample.instances, cfg, rng);

    const std::string base = std::string(name);
    save_image_png(fs::path(opts.out_dir) / (base + "_image.png"), sample.image);
    save_instance_png(fs::path(opts.out_dir) / (base + "_anno.png"), sample.instances);
    save_plane_png(fs::path(opts.out_dir) / (base + "_ps.png"), ch.ps);
    save_plane_png(fs::path(opts.out_dir) / (base + "_pe.png"), ch.pe);
    save_plane_png(fs::path(opts.out_dir) / (base + "_pd.png"), ch.pd);
    entries[i] = {{"name", base},          {"image", base + "_image.png"},
                  {"instances", base + "_anno.png"}, {"ps", base + "_ps.png"},
                  {"pe", base + "_pe.png"},          {"pd", base + "_pd.png"}};
  });
  for (json& e : entries) samples.push_back(std::move(e));

  json cfg_json;
  {
    const fs::path tmp = fs::path(opts.out_dir) / "synth_config.json";
    synth::save_synth_config(tmp, cfg);
    cfg_json = load_json_file(tmp);
  }
  write_json_atomic(fs::path(opts.out_dir) / "manifest.json",
                    {{"samples", samples}, {"synth_config", cfg_json}});

  RunManifest manifest("synth", cfg_json, cfg.seed);
  manifest.add_output(opts.out_dir);
  manifest.write(opts.out_dir);
  if (global.verbose) std::cerr << "synth: wrote " << opts.count << " samples\n";
}

struct AugmentOpts {
  std::string in_dir, out_dir, config_path;
  std::string strategy = "I";
  Eigen::Index crop = 400;
  std::uint64_t seed = 0;
  double k1_min = -0.15, k1_max = 0.15;
};

void run_augment(const AugmentOpts& opts, const CLI::App& cmd, const GlobalOpts& global) {
  AugmentOpts o = opts;
  if (!o.config_path.empty()) {
    const json cfg = load_json_file(o.config_path);
    config_default(cmd, cfg, "--strategy", "strategy", o.strategy);
    config_default(cmd, cfg, "--crop", "crop", o.crop);
    config_default(cmd, cfg, "--seed", "seed", o.seed);
    config_default(cmd, cfg, "--k1-min", "k1_min", o.k1_min);
    config_default(cmd, cfg, "--k1-max", "k1_max", o.k1_max);
  }
  if (global.seed) o.seed = *global.seed;

  augment::AugmentConfig acfg;
  if (o.strategy == "I") acfg.strategy = augment::AugmentConfig::Strategy::kFlipRotate;
  else if (o.strategy == "II") acfg.strategy = augment::AugmentConfig::Strategy::kFlipRotateElastic;
  else throw ValidationError("augment: --strategy must be I or II");
  acfg.crop_size = o.crop;
  acfg.seed = o.seed;
  acfg.k1_min = o.k1_min;
  acfg.k1_max = o.k1_max;

  const std::vector<SampleFiles> inputs = discover_samples(o.in_dir);
  if (inputs.empty()) throw ValidationError("augment: no samples found in " + o.in_dir);
  for (const SampleFiles& s : inputs)
    if (s.image.empty() || s.instances.empty())
      throw ValidationError("augment: sample '" + s.name + "' lacks image or instance map");

  fs::create_directories(o.out_dir);
  std::vector<json> entries(inputs.size());
  parallel_for(inputs.size(), global.jobs, [&](std::size_t i) {
    augment::Sample sample;
    sample.image = load_image_png(inputs[i].image);
    sample.labels.push_back(load_instance_png(inputs[i].instances));
    json local = json::array();
    for (const auto& [variant, aug] : augment::augment_sample(sample, acfg, i)) {
      const std::string base = inputs[i].name + "_" + variant;
      save_image_png(fs::path(o.out_dir) / (base + "_image.png"), aug.image);
      save_instance_png(fs::path(o.out_dir) / (base + "_anno.png"), aug.labels.front());
      local.push_back({{"name", base},
                       {"image", base + "_image.png"},
                       {"instances", base + "_anno.png"}});
    }
    entries[i] = std::move(local);
  });
  json samples = json::array();
  for (json& group : entries)
    for (json& e : group) samples.push_back(std::move(e));
  write_json_atomic(fs::path(o.out_dir) / "manifest.json", {{"samples", samples}});

  RunManifest manifest("augment",
                       {{"in", o.in_dir},
                        {"strategy", o.strategy},
                        {"crop", o.crop},
                        {"k1_min", o.k1_min},
                        {"k1_max", o.k1_max}},
                       o.seed);
  manifest.add_input(o.in_dir);
  manifest.add_output(o.out_dir);
  manifest.write(o.out_dir);
  if (global.verbose)
    std::cerr << "augment: " << samples.size() << " variants from " << inputs.size()
              << " samples\n";
}

}  // namespace

void register_derive(CLI::App& app, const GlobalOpts& global) {
  auto opts = std::make_shared<DeriveOpts>();
  CLI::App* cmd = app.add_subcommand(
      "derive", "Derive edge mask, bounding boxes and box-count map from an instance map");
  cmd->add_option("--in", opts->in_path, "Instance map PNG")->required();
  cmd->add_option("--out", opts->out_dir, "Output directory")->required();
  cmd->add_option("--edge-radius", opts->edge_radius, "Disk radius for edge dilation");
  cmd->add_option("--edge-border", opts->edge_border,
                  "Out-of-bounds neighbor rule: replicate or background");
  cmd->add_option("--config", opts->config_path, "JSON config (flags win)");
  cmd->callback([opts, cmd, &global] { run_derive(*opts, *cmd, global); });
}

void register_synth(CLI::App& app, const GlobalOpts& global) {
  auto opts = std::make_shared<SynthOpts>();
  CLI::App* cmd = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  cmd->add_option("--out", opts->out_dir, "Output directory")->required();
  cmd->add_option("--count", opts->count, "Number of samples")->required();
  cmd->add_option("--config", opts->config_path, "Synth config JSON");
  cmd->add_option("--seed", opts->seed, "Seed override");
  cmd->callback([opts, cmd, &global] { run_synth(*opts, *cmd, global); });
}

void register_augment(CLI::App& app, const GlobalOpts& global) {
  auto opts = std::make_shared<AugmentOpts>();
  CLI::App* cmd = app.add_subcommand(
      "augment", "Write flip/rotation (and optionally elastic) variants, randomly cropped");
  cmd->add_option("--in", opts->in_dir, "Input dataset directory")->required();
  cmd->add_option("--out", opts->out_dir, "Output directory")->required();
  cmd->add_option("--strategy", opts->strategy, "I (flip+rotate) or II (adds elastic)");
  cmd->add_option("--crop", opts->crop, "Random crop size (pixels)");
  cmd->add_option("--seed", opts->seed, "Seed");
  cmd->add_option("--k1-min", opts->k1_min, "Radial distortion coefficient lower bound");
  cmd->add_option("--k1-max", opts->k1_max, "Radial distortion coefficient upper bound");
  cmd->add_option("--config", opts->config_path, "JSON config (flags win)");
  cmd->callback([opts, cmd, &global] { run_augment(*opts, *cmd, global); });
}

}  // namespace gseg::cli
