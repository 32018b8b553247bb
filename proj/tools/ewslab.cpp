// ewslab <fig1|fig2|fig3|theorem> --config <file> [--out <dir>] [--seed <u64>] [--svg]

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ewslab/config.hpp"
#include "ewslab/error.hpp"
#include "ewslab/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEmptyWindow = 4;

int exit_code_for(ewslab::ErrorKind kind) {
  switch (kind) {
    case ewslab::ErrorKind::ParseError:
    case ewslab::ErrorKind::ValidationError:
      return kExitConfig;
    case ewslab::ErrorKind::EmptyAnalysisWindow:
      return kExitEmptyWindow;
    default:
      return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Early-warning-signal experiments for a noise-coupled fold system"};
  app.require_subcommand(1);

  std::string config_file;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool svg = false;

  for (const char* name : {"fig1", "fig2", "fig3", "theorem"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_file, "sectioned key = value config file (empty file: defaults)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "master seed (overrides sim.seed)");
    sub->add_flag("--svg", svg, "also write SVG plots");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    ewslab::ExperimentConfig cfg = ewslab::load_config(config_file);
    cfg.experiment = ewslab::parse_experiment(app.get_subcommands().front()->get_name());
    if (out_dir) cfg.output_dir = *out_dir;
    if (seed) cfg.sim.seed = *seed;
    if (svg) cfg.emit_svg = true;
    std::cout << ewslab::run_experiment(cfg);
    std::cout << "wrote " << cfg.output_dir << '\n';
  } catch (const ewslab::Error& e) {
    std::cerr << "ewslab: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ewslab: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
