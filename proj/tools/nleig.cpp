#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nleig/nleig.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nonlinear nonlocal eigenvalue solver"};
  app.set_version_flag("--version", nleig::kVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string output_dir;
  bool allow_nonstandard = false;
  unsigned threads = 1;

  for (const auto& name : nleig::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration (or a previous meta.json)")->required();
    sub->add_option("--output", output_dir, "output directory")->required();
    sub->add_flag("--allow-nonstandard", allow_nonstandard, "exploratory mode; outputs are stamped unvalidated");
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  nleig::RunConfig cfg;
  try {
    cfg = nleig::load_run_config(config_path);
  } catch (const nleig::Error& e) {
    std::cerr << "nleig: " << e.what() << "\n";
    return nleig::exit_code_for(e.code());
  }
  cfg.command = command;
  if (allow_nonstandard) cfg.allow_nonstandard = true;

  const nleig::RunOutcome outcome = nleig::run(cfg, output_dir, threads);
  if (!outcome.message.empty()) std::cerr << "nleig: " << outcome.message << "\n";
  return outcome.exit_code;
}
