#pragma once

#include "dcfp/cli/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace dcfp::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailure = 1;
inline constexpr int kExitInvalidInput = 2;

struct GlobalOptions {
  std::string config_path; // empty: built-in defaults
  std::string out_path;    // file (or stem for multi-file commands)
  std::uint64_t seed = 42;
  int threads = 1;
  std::string format = "csv"; // stdout summary flavor: csv (plain) | json
};

// Each command reads its own [section] of the config, writes its outputs,
// prints a one-line summary to `log`, and returns an exit code. Invalid
// input escapes as ConfigError / std::invalid_argument; main maps those to
// exit code 2.
int cmd_scan2d(const GlobalOptions& options, std::ostream& log);
int cmd_scan_single(const GlobalOptions& options, std::ostream& log);
int cmd_spectral_scan(const GlobalOptions& options, std::ostream& log);
int cmd_spectral_readout(const GlobalOptions& options, std::ostream& log);
int cmd_oracle_check(const GlobalOptions& options, std::ostream& log);
int cmd_simulate(const GlobalOptions& options, std::ostream& log);

int run_command(const std::string& name, const GlobalOptions& options, std::ostream& log);

} // namespace dcfp::cli
