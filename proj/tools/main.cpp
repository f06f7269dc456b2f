// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cli_app.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "cvcap: classical capacity of multi-mode Gaussian measurement channels"};

  std::string config_path;
  std::string command;
  std::string output_path;
  bool strict = false;
  std::optional<std::uint64_t> seed_override;

  app.add_option("--config", config_path, "Path to the JSON run configuration")
      ->required();
  app.add_option("--command", command,
                 "One of: validate, structure, capacity, sweep, simulate")
      ->required();
  app.add_flag("--strict", strict,
               "Fail (exit 4) when the threshold condition is violated");
  app.add_option("--output", output_path,
                 "Write the report to this file instead of standard output");
  app.add_option("--seed", seed_override, "Override the seed from the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cvcap::cli::kInvalidInput;
  }

  try {
    cvcap::cli::RunConfig config = cvcap::cli::load_config(config_path);
    if (seed_override) config.seed = *seed_override;

    if (output_path.empty()) {
      return cvcap::cli::run_command(command, config, strict, std::cout);
    }
    std::ofstream out(output_path);
    if (!out) {
      std::cerr << "error: cannot open output file: " << output_path << "\n";
      return cvcap::cli::kInvalidInput;
    }
    return cvcap::cli::run_command(command, config, strict, out);
  } catch (const cvcap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cvcap::cli::kInvalidInput;
  }
}
