#include <CLI11.hpp>
#include <iostream>

#include "speclab/config.hpp"
#include "speclab/errors.hpp"
#include "speclab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"speclab: Dirichlet spectra, torsion and asymmetry of planar sets"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  int jobs = -1;
  for (const char* name : {"eig", "torsion", "asym", "verify", "sweep", "sharpness"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--jobs", jobs, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto cfg = speclab::load_config(config_path);
    if (speclab::command_name(cfg.command) != command)
      throw speclab::ConfigError("command", 0,
                                 "config says '" + std::string(speclab::command_name(cfg.command)) +
                                     "' but '" + command + "' was requested");
    if (!out_dir.empty()) cfg.out = out_dir;
    if (jobs >= 0) cfg.jobs = static_cast<unsigned>(jobs);
    return speclab::run(cfg, std::cout).exit_code;
  } catch (const speclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
