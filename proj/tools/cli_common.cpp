#include "cli_common.hpp"

#include "gseg/version.hpp"

#include <algorithm>
#include <fstream>
#include <map>

namespace gseg::cli {

namespace fs = std::filesystem;

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<SampleFiles> discover_samples(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<SampleFiles> samples;

  const fs::path manifest_path = dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    const json manifest = load_json_file(manifest_path);
    if (!manifest.contains("samples") || !manifest["samples"].is_array())
      throw ValidationError(manifest_path.string() + ": missing samples array");
    for (const json& entry : manifest["samples"]) {
      SampleFiles s;
      s.name = entry.value("name", "");
      if (s.name.empty()) throw ValidationError(manifest_path.string() + ": sample without name");
      const auto path_of = [&](const char* key) -> fs::path {
        return entry.contains(key) ? dir / entry[key].get<std::string>() : fs::path{};
      };
      s.image = path_of("image");
      s.instances = path_of("instances");
      s.ps = path_of("ps");
      s.pe = path_of("pe");
      s.pd = path_of("pd");
      samples.push_back(std::move(s));
    }
  } else {
    // Naming-scheme fallback: group by stem before the final _suffix.
    std::map<std::string, SampleFiles> by_stem;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
      const std::string stem = entry.path().stem().string();
      const auto us = stem.rfind('_');
      if (us == std::string::npos) continue;
      const std::string base = stem.substr(0, us), kind = stem.substr(us + 1);
      SampleFiles& s = by_stem[base];
      s.name = base;
      if (kind == "image") s.image = entry.path();
      else if (kind == "anno") s.instances = entry.path();
      else if (kind == "ps") s.ps = entry.path();
      else if (kind == "pe") s.pe = entry.path();
      else if (kind == "pd") s.pd = entry.path();
    }
    for (auto& [base, s] : by_stem) samples.push_back(std::move(s));
  }

  std::sort(samples.begin(), samples.end(),
            [](const SampleFiles& a, const SampleFiles& b) { return a.name < b.name; });
  return samples;
}

void write_json_atomic(const fs::path& path, const json& j) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
}

RunManifest::RunManifest(std::string subcommand, json config, std::uint64_t seed)
    : subcommand_(std::move(subcommand)), config_(std::move(config)), seed_(seed) {}

void RunManifest::write(const fs::path& out_dir) const {
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  const json j = {{"tool", "gseg"},
                  {"version", kVersion},
                  {"subcommand", subcommand_},
                  {"seed", seed_},
                  {"config", config_},
                  {"inputs", inputs_},
                  {"outputs", outputs_},
                  {"duration_seconds", seconds}};
  write_json_atomic(out_dir / "run_manifest.json", j);
}

}  // namespace gseg::cli
