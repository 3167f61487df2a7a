#pragma once

#include "cli_common.hpp"

#include <CLI11.hpp>

#include <optional>

namespace gseg::cli {

struct GlobalOpts {
  int jobs = 1;
  std::optional<std::uint64_t> seed;  // overrides per-command/config seeds
  bool verbose = false;
};

void register_evaluate(CLI::App& app, const GlobalOpts& global);
void register_rank(CLI::App& app, const GlobalOpts& global);
void register_derive(CLI::App& app, const GlobalOpts& global);
void register_synth(CLI::App& app, const GlobalOpts& global);
void register_augment(CLI::App& app, const GlobalOpts& global);
void register_train_fusion(CLI::App& app, const GlobalOpts& global);
void register_infer_fusion(CLI::App& app, const GlobalOpts& global);

/// Config-file fallback: a JSON value supplies the option's value only when
/// the flag was not given on the command line.
template <typename T>
void config_default(const CLI::App& app, const json& cfg, const char* flag, const char* key,
                    T& value) {
  if (app.count(flag) == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

}  // namespace gseg::cli
