#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "scgk/config.hpp"
#include "scgk/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"plane-layer magnetoconvection with a spectral Galerkin correction step"};
  app.require_subcommand(1);

  std::string config, output_dir, resume, checkpoint;
  auto* run = app.add_subcommand("run", "time-step a configuration");
  run->add_option("--config", config, "key = value configuration file")->required();
  run->add_option("--output-dir", output_dir, "overrides output_dir from the config");
  run->add_option("--resume", resume, "start from this checkpoint");

  auto* inspect = app.add_subcommand("inspect", "print a checkpoint header and its energies");
  inspect->add_option("--checkpoint", checkpoint, "checkpoint file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? scgk::kExitOk : scgk::kExitUsage;
  }

  if (*inspect) return scgk::inspect(checkpoint, std::cout, std::cerr);

  if (!std::filesystem::is_regular_file(config)) {
    std::cerr << "error: cannot open config " << config << "\n";
    return scgk::kExitIo;
  }
  scgk::RunConfig cfg;
  try {
    cfg = scgk::load_config(config);
  } catch (const scgk::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return scgk::kExitUsage;
  }
  scgk::RunOptions opt;
  if (!output_dir.empty()) opt.output_dir = output_dir;
  if (!resume.empty()) opt.resume = resume;
  return scgk::run(cfg, opt, std::cerr);
}
