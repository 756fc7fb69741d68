// rghl: run and compare black-box optimizers on synthetic objectives.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rghl/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"RGHL black-box optimization experiments"};
  app.set_version_flag("--version", rghl::cli::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repeats;
  std::optional<std::size_t> jobs;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "Run config (JSON)")->required();
    cmd->add_option("--out", out, "Output directory");
    cmd->add_option("--seed", seed, "Base seed; repeat i uses seed + i");
    cmd->add_option("--repeats", repeats, "Independent runs per strategy");
    cmd->add_option("--jobs", jobs,
                    "Worker threads (default: available processors)");
  };
  auto* run = app.add_subcommand("run", "Run the configured experiment");
  add_common(run);
  auto* compare = app.add_subcommand(
      "compare", "Run all strategies under paired seeds and rank them");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  rghl::cli::Overrides ov;
  if (out) ov.out = *out;
  ov.seed = seed;
  ov.repeats = repeats;
  ov.jobs = jobs;

  if (run->parsed()) {
    return rghl::cli::cmd_run(config_path, ov, std::cout, std::cerr);
  }
  return rghl::cli::cmd_compare(config_path, ov, std::cout, std::cerr);
}
