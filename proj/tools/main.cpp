#include "dcfp/cli/commands.hpp"
#include "dcfp/constants.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Dual-channel Fabry-Perot biphoton interferometry toolkit"};
  app.set_version_flag("--version", std::string("dcfp ") + dcfp::tool_version);
  app.require_subcommand(1);
  app.fallthrough(); // global flags may follow the subcommand

  dcfp::cli::GlobalOptions options;
  app.add_option("--config", options.config_path, "Config file (INI sections per subcommand)");
  app.add_option("--out", options.out_path, "Output path (stem for multi-file commands)");
  app.add_option("--seed", options.seed, "Random seed for stochastic commands");
  app.add_option("--threads", options.threads, "Worker threads for scans")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", options.format, "Stdout summary format")
      ->check(CLI::IsMember({"csv", "json"}));

  static const char* const kCommands[] = {"scan2d",           "scan-single",
                                          "spectral-scan",    "spectral-readout",
                                          "oracle-check",     "simulate"};
  static const char* const kDescriptions[] = {
      "Rate map over both cavity length offsets",
      "Transmission coincidence vs a single shared cavity length",
      "Envelope-resolved coincidence rate vs cavity length",
      "Invert a spectral scan into envelope frequency offsets",
      "Verify closed-form amplitudes against the brute-force path sum",
      "Monte Carlo click streams and rate estimates vs analytic"};
  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    app.add_subcommand(kCommands[i], kDescriptions[i]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return dcfp::cli::run_command(app.get_subcommands().front()->get_name(), options,
                                  std::cout);
  } catch (const dcfp::cli::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dcfp::cli::kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dcfp::cli::kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dcfp::cli::kExitInvalidInput;
  }
}
