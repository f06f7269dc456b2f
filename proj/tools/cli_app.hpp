// SPDX-License-Identifier: Apache-2.0

#ifndef CVCAP_CLI_APP_HPP
#define CVCAP_CLI_APP_HPP

#include <iosfwd>
#include <optional>
#include <string>

#include "cvcap/capacity.hpp"

namespace cvcap::cli {

struct EnergySweep {
  double start;
  double stop;
  int steps;
};

/// Run configuration, read from a flat JSON document. Matrices are given
/// as row-major arrays of 2s*2s doubles.
struct RunConfig {
  int modes = 0;
  Matrix epsilon;
  Matrix beta;
  Matrix k_matrix;  // defaults to the identity
  std::optional<double> energy;
  std::optional<EnergySweep> sweep;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  bool report_bits = true;  // log_base "2" (default) versus "e"
};

/// Parses a config document; throws InvalidInput on malformed content.
RunConfig parse_config(const std::string& json_text);

/// Reads and parses a config file.
RunConfig load_config(const std::string& path);

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kInfeasibleEnergy = 3,
  kThresholdViolated = 4,
  kNoConvergence = 5,
};

/// Executes one command (validate, structure, capacity, sweep, simulate)
/// and writes its report to `out`. Returns the exit code.
int run_command(const std::string& command, const RunConfig& config,
                bool strict, std::ostream& out);

/// Formats a double with 12 significant digits, locale-independent.
std::string format_number(double value);

}  // namespace cvcap::cli

#endif  // CVCAP_CLI_APP_HPP
