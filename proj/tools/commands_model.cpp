#include "commands.hpp"

#include "gseg/fusion_io.hpp"
#include "gseg/parallel.hpp"
#include "gseg/png_io.hpp"
#include "gseg/postprocess.hpp"

#include <iostream>

namespace gseg::cli {
namespace {

namespace fs = std::filesystem;

nn::Tensor<float> load_channels(const SampleFiles& s) {
  if (!s.has_channels())
    throw ValidationError("sample '" + s.name + "' lacks ps/pe/pd channel planes");
  std::vector<PlaneF> planes{load_plane_png(s.ps), load_plane_png(s.pe), load_plane_png(s.pd)};
  return nn::stack_planes(planes);
}

struct TrainOpts {
  std::string data_dir, config_path, out_dir;
  std::uint64_t seed = 0;
};

nn::FusionNetConfig net_config_from_json(const json& cfg) {
  if (!cfg.contains("net")) return nn::default_fusion_config(3);
  const json& net = cfg.at("net");
  const auto channels = net.at("channels").get<std::vector<Eigen::Index>>();
  const auto dilations = net.at("dilations").get<std::vector<Eigen::Index>>();
  if (channels.size() < 2 || dilations.size() + 1 != channels.size())
    throw ValidationError("train-fusion: net.channels must chain with net.dilations");
  nn::FusionNetConfig out;
  for (std::size_t i = 0; i + 1 < channels.size(); ++i)
    out.layers.push_back(
        {channels[i], channels[i + 1], dilations[i], i + 2 < channels.size()});
  return out;
}

void run_train(const TrainOpts& opts, const CLI::App& cmd, const GlobalOpts& global) {
  const json cfg_json = load_json_file(opts.config_path);
  nn::TrainConfig tc;
  tc.learning_rate = cfg_json.value("learning_rate", tc.learning_rate);
  tc.momentum = cfg_json.value("momentum", tc.momentum);
  tc.weight_decay = cfg_json.value("weight_decay", tc.weight_decay);
  tc.iterations = cfg_json.value("iterations", tc.iterations);
  tc.batch_size = cfg_json.value("batch_size", tc.batch_size);
  tc.seed = cfg_json.value("seed", tc.seed);
  if (cmd.count("--seed") > 0) tc.seed = opts.seed;
  if (global.seed) tc.seed = *global.seed;
  const nn::FusionNetConfig net_cfg = net_config_from_json(cfg_json);

  std::vector<SampleFiles> files = discover_samples(opts.data_dir);
  std::erase_if(files, [](const SampleFiles& s) {
    return !s.has_channels() || s.instances.empty();
  });
  if (files.empty())
    throw ValidationError("train-fusion: no samples with channels + instances in " +
                          opts.data_dir);

  std::vector<nn::TrainSample> data(files.size());
  parallel_for(files.size(), global.jobs, [&](std::size_t i) {
    data[i].channels = load_channels(files[i]);
    data[i].target = (load_instance_png(files[i].instances) != 0).cast<std::uint8_t>();
  });

  const nn::TrainResult result = nn::train_fusion(data, net_cfg, tc, global.jobs);
  fs::create_directories(opts.out_dir);
  nn::save_model(opts.out_dir, result.net, tc.seed);
  write_json_atomic(fs::path(opts.out_dir) / "losses.json",
                    {{"losses", result.losses}});

  RunManifest manifest("train-fusion",
                       {{"data", opts.data_dir},
                        {"learning_rate", tc.learning_rate},
                        {"momentum", tc.momentum},
                        {"weight_decay", tc.weight_decay},
                        {"iterations", tc.iterations},
                        {"batch_size", tc.batch_size}},
                       tc.seed);
  manifest.add_input(opts.data_dir);
  manifest.add_input(opts.config_path);
  manifest.add_output(opts.out_dir);
  manifest.write(opts.out_dir);
  if (global.verbose)
    std::cerr << "train-fusion: " << tc.iterations
              << " steps, final loss=" << result.losses.back() << "\n";
}

struct InferOpts {
  std::string model_dir, channels_dir, out_dir;
  bool edge_split = false;
  Eigen::Index min_area = 100;
  int connectivity = 4;
};

void run_infer(const InferOpts& opts, const GlobalOpts& global) {
  const nn::FusionNet<float> net = nn::load_model(opts.model_dir);
  std::vector<SampleFiles> files = discover_samples(opts.channels_dir);
  std::erase_if(files, [](const SampleFiles& s) { return !s.has_channels(); });
  if (files.empty())
    throw ValidationError("infer-fusion: no channel samples in " + opts.channels_dir);

  fs::create_directories(opts.out_dir);
  std::vector<std::string> outputs(files.size());
  parallel_for(files.size(), global.jobs, [&](std::size_t i) {
    const nn::Tensor<float> channels = load_channels(files[i]);
    const nn::Tensor<float> probs = nn::forward(net, channels);
    const Mask mask = post::binarize_argmax(PlaneF(probs.plane(0)), PlaneF(probs.plane(1)));
    InstanceMap instances;
    if (opts.edge_split) {
      const Mask edges = (channels.plane(1) >= 0.5f).cast<std::uint8_t>();
      instances = post::extract_instances_edge_split(mask, edges, opts.connectivity);
    } else {
      instances = post::extract_instances(mask, opts.connectivity);
    }
    instances = post::remove_small(post::fill_holes(instances), opts.min_area);
    const std::string name = files[i].name + "_pred.png";
    save_instance_png(fs::path(opts.out_dir) / name, instances);
    outputs[i] = name;
  });

  RunManifest manifest("infer-fusion",
                       {{"model", opts.model_dir},
                        {"channels", opts.channels_dir},
                        {"edge_split", opts.edge_split},
                        {"min_area", opts.min_area},
                        {"connectivity", opts.connectivity}},
                       0);
  manifest.add_input(opts.model_dir);
  manifest.add_input(opts.channels_dir);
  for (const std::string& o : outputs) manifest.add_output(fs::path(opts.out_dir) / o);
  manifest.write(opts.out_dir);
  if (global.verbose) std::cerr << "infer-fusion: wrote " << outputs.size() << " maps\n";
}

}  // namespace

void register_train_fusion(CLI::App& app, const GlobalOpts& global) {
  auto opts = std::make_shared<TrainOpts>();
  CLI::App* cmd = app.add_subcommand("train-fusion", "Train the fusion net on channel planes");
  cmd->add_option("--data", opts->data_dir, "Dataset directory (channels + instances)")
      ->required();
  cmd->add_option("--config", opts->config_path, "Training config JSON")->required();
  cmd->add_option("--out", opts->out_dir, "Model output directory")->required();
  cmd->add_option("--seed", opts->seed, "Seed override");
  cmd->callback([opts, cmd, &global] { run_train(*opts, *cmd, global); });
}

void register_infer_fusion(CLI::App& app, const GlobalOpts& global) {
  auto opts = std::make_shared<InferOpts>();
  CLI::App* cmd = app.add_subcommand(
      "infer-fusion", "Run the fusion net and post-process into instance maps");
  cmd->add_option("--model", opts->model_dir, "Model directory")->required();
  cmd->add_option("--channels", opts->channels_dir, "Directory of channel planes")->required();
  cmd->add_option("--out", opts->out_dir, "Output directory")->required();
  cmd->add_flag("--edge-split", opts->edge_split,
                "Split touching instances along the edge channel");
  cmd->add_option("--min-area", opts->min_area, "Drop instances smaller than this");
  cmd->add_option("--connectivity", opts->connectivity, "Component connectivity (4 or 8)");
  cmd->callback([opts, &global] { run_infer(*opts, global); });
}

}  // namespace gseg::cli
