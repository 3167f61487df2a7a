#pragma once

#include "gseg/types.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gseg::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// One dataset entry; paths are absolute.
struct SampleFiles {
  std::string name;
  std::filesystem::path image;
  std::filesystem::path instances;
  std::filesystem::path ps, pe, pd;

  bool has_channels() const { return !ps.empty() && !pe.empty() && !pd.empty(); }
};

/// Samples of a dataset directory: manifest.json when present, otherwise
/// discovery by the *_image/_anno/_ps/_pe/_pd.png naming scheme. Sorted by
/// name.
std::vector<SampleFiles> discover_samples(const std::filesystem::path& dir);

json load_json_file(const std::filesystem::path& path);

/// Tracks a run and writes run_manifest.json (atomically, on success only)
/// into the primary output directory.
class RunManifest {
 public:
  RunManifest(std::string subcommand, json config, std::uint64_t seed);

  void add_input(const std::filesystem::path& p) { inputs_.push_back(p.string()); }
  void add_output(const std::filesystem::path& p) { outputs_.push_back(p.string()); }
  void write(const std::filesystem::path& out_dir) const;

 private:
  std::string subcommand_;
  json config_;
  std::uint64_t seed_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_json_atomic(const std::filesystem::path& path, const json& j);

}  // namespace gseg::cli
