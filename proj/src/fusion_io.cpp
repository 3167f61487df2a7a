#include "gseg/fusion_io.hpp"

#include "gseg/parallel.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>

namespace gseg::nn {
namespace {

using nlohmann::json;

void write_f32_le(std::ofstream& out, const float* values, std::size_t count) {
  std::vector<unsigned char> bytes(count * 4);
  for (std::size_t i = 0; i < count; ++i) {
    const auto u = std::bit_cast<std::uint32_t>(values[i]);
    bytes[i * 4 + 0] = u & 0xFF;
    bytes[i * 4 + 1] = (u >> 8) & 0xFF;
    bytes[i * 4 + 2] = (u >> 16) & 0xFF;
    bytes[i * 4 + 3] = (u >> 24) & 0xFF;
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
}

void read_f32_le(std::ifstream& in, float* values, std::size_t count) {
  std::vector<unsigned char> bytes(count * 4);
  in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
  if (std::size_t(in.gcount()) != bytes.size()) throw IoError("model blob truncated");
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t u = std::uint32_t(bytes[i * 4 + 0]) |
                            std::uint32_t(bytes[i * 4 + 1]) << 8 |
                            std::uint32_t(bytes[i * 4 + 2]) << 16 |
                            std::uint32_t(bytes[i * 4 + 3]) << 24;
    values[i] = std::bit_cast<float>(u);
  }
}

}  // namespace

void save_model(const std::filesystem::path& dir, const FusionNet<float>& net,
                std::uint64_t seed) {
  validate_fusion_config(net.config);
  std::filesystem::create_directories(dir);

  json layers = json::array();
  for (std::size_t i = 0; i < net.config.layers.size(); ++i) {
    const ConvLayerSpec& spec = net.config.layers[i];
    layers.push_back({{"in_channels", spec.in_channels},
                      {"out_channels", spec.out_channels},
                      {"dilation", spec.dilation},
                      {"relu", spec.relu},
                      {"weight_shape", net.weights[i].shape()},
                      {"bias_length", net.biases[i].size()}});
  }
  const json manifest = {{"format", "gseg-fusion"},
                         {"format_version", 1},
                         {"dtype", "float32"},
                         {"byte_order", "little"},
                         {"seed", seed},
                         {"blob", "weights.bin"},
                         {"parameter_count", net.parameter_count()},
                         {"layers", layers}};

  std::ofstream mf(dir / "manifest.json");
  if (!mf) throw IoError("cannot write " + (dir / "manifest.json").string());
  mf << manifest.dump(2) << "\n";

  std::ofstream blob(dir / "weights.bin", std::ios::binary);
  if (!blob) throw IoError("cannot write " + (dir / "weights.bin").string());
  for (std::size_t i = 0; i < net.weights.size(); ++i) {
    write_f32_le(blob, net.weights[i].data(), std::size_t(net.weights[i].size()));
    write_f32_le(blob, net.biases[i].data(), std::size_t(net.biases[i].size()));
  }
}

FusionNet<float> load_model(const std::filesystem::path& dir, std::uint64_t* seed) {
  std::ifstream mf(dir / "manifest.json");
  if (!mf) throw IoError("cannot open " + (dir / "manifest.json").string());
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::parse_error& e) {
    throw ValidationError((dir / "manifest.json").string() + ": " + e.what());
  }
  try {
    if (manifest.at("format") != "gseg-fusion")
      throw ValidationError("not a fusion model manifest");
    if (manifest.at("dtype") != "float32" || manifest.at("byte_order") != "little")
      throw ValidationError("unsupported model encoding");

    FusionNet<float> net;
    for (const json& layer : manifest.at("layers")) {
      ConvLayerSpec spec;
      spec.in_channels = layer.at("in_channels").get<Eigen::Index>();
      spec.out_channels = layer.at("out_channels").get<Eigen::Index>();
      spec.dilation = layer.at("dilation").get<Eigen::Index>();
      spec.relu = layer.at("relu").get<bool>();
      net.config.layers.push_back(spec);
      net.weights.emplace_back(
          std::vector<Eigen::Index>{spec.out_channels, spec.in_channels, 3, 3});
      net.biases.push_back(ArrayX<float>::Zero(spec.out_channels));
    }
    validate_fusion_config(net.config);

    std::ifstream blob(dir / manifest.at("blob").get<std::string>(), std::ios::binary);
    if (!blob) throw IoError("cannot open model blob in " + dir.string());
    for (std::size_t i = 0; i < net.weights.size(); ++i) {
      read_f32_le(blob, net.weights[i].data(), std::size_t(net.weights[i].size()));
      read_f32_le(blob, net.biases[i].data(), std::size_t(net.biases[i].size()));
    }
    if (seed) *seed = manifest.value("seed", std::uint64_t(0));
    return net;
  } catch (const json::exception& e) {
    throw ValidationError((dir / "manifest.json").string() + ": " + e.what());
  }
}

TrainResult train_fusion(const std::vector<TrainSample>& data, const FusionNetConfig& net_cfg,
                         const TrainConfig& cfg, int jobs) {
  validate_train_config(cfg);
  if (data.empty()) throw ValidationError("train_fusion: empty dataset");
  for (const TrainSample& s : data) {
    if (s.channels.rank() != 3 || s.channels.extent(0) != net_cfg.layers.front().in_channels)
      throw ValidationError("train_fusion: sample channel count does not match the net");
    require_same_shape(s.channels.extent(1), s.channels.extent(2), s.target.rows(),
                       s.target.cols(), "train_fusion");
  }

  TrainResult result;
  result.net = xavier_init<float>(net_cfg, cfg.seed);
  Gradients<float> velocity = Gradients<float>::zeros_like(result.net);
  Rng batch_rng(cfg.seed, 1);

  std::vector<std::size_t> batch(cfg.batch_size);
  std::vector<Gradients<float>> sample_grads(cfg.batch_size);
  std::vector<float> sample_loss(cfg.batch_size);
  for (Eigen::Index step = 0; step < cfg.iterations; ++step) {
    for (Eigen::Index b = 0; b < cfg.batch_size; ++b)
      batch[b] = std::size_t(batch_rng.uniform_int(0, std::int64_t(data.size()) - 1));

    parallel_for(std::size_t(cfg.batch_size), jobs, [&](std::size_t b) {
      const TrainSample& s = data[batch[b]];
      sample_loss[b] = backward(result.net, s.channels, s.target, sample_grads[b]);
    });

    Gradients<float> grads = Gradients<float>::zeros_like(result.net);
    double loss = 0;
    const float inv_batch = 1.0f / float(cfg.batch_size);
    for (Eigen::Index b = 0; b < cfg.batch_size; ++b) {
      grads.add_scaled(sample_grads[b], inv_batch);
      loss += double(sample_loss[b]);
    }
    sgd_step(result.net, velocity, grads, cfg);
    result.losses.push_back(loss / double(cfg.batch_size));
  }
  return result;
}

}  // namespace gseg::nn
