#include "commands.hpp"

#include "gseg/types.hpp"
#include "gseg/version.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace gseg;
  CLI::App app{"gland instance segmentation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough(true);

  cli::GlobalOpts global;
  app.add_option("--jobs", global.jobs, "Worker threads for per-image work");
  app.add_option("--seed", global.seed, "Global seed override for seeded subcommands");
  app.add_flag("--verbose", global.verbose, "Progress diagnostics on stderr");

  cli::register_derive(app, global);
  cli::register_evaluate(app, global);
  cli::register_rank(app, global);
  cli::register_augment(app, global);
  cli::register_synth(app, global);
  cli::register_train_fusion(app, global);
  cli::register_infer_fusion(app, global);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return cli::kExitOk;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return cli::kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return cli::kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return cli::kExitOk;
}
