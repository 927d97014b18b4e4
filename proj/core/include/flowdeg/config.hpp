#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowdeg/problems.hpp"

namespace flowdeg {

/// Declarative description of one run: the problem, the region, schedules
/// and tolerances.  Serialized as JSON; round-trips losslessly.
struct RunConfig {
  struct Problem {
    /// Either a preset name ...
    std::string preset;
    /// ... or transmission-line parameters ...
    std::optional<TransmissionLineParams> txline;
    int txline_n = 16;
    /// ... or an operator file with a named nonlinearity.
    std::string operator_file;
    std::string weight_file;
    /// "zero" | "constant" (value) | "tanh" (amplitude).
    std::string nonlinearity = "zero";
    double nl_value = 0.0;
    std::vector<double> nl_vector;
    double period = 1.0;
    double lipschitz = 0.0;
    double growth = 0.0;
    std::optional<double> bound;
  };

  struct RegionSpec {
    std::string kind;  ///< "box" | "ball"; empty = preset default region
    std::vector<double> lower, upper;
    std::vector<double> center;
    double radius = 1.0;
    /// Measure the ball in the problem's weighted norm.
    bool weighted = false;
  };

  int schema = 1;
  Problem problem;
  RegionSpec region;
  std::vector<double> t_schedule;
  std::vector<double> lambda_schedule;
  double nu = 1.0;
  double integrator_tolerance = 1e-8;
  std::uint64_t seed = 0x5EED;
  std::size_t degree_seeds = 0;  ///< 0 = auto
  int averaging_nodes = 0;       ///< 0 = default
  /// integrate command inputs.
  std::vector<double> x0;
  double horizon = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  int steps = 0;
  std::string output_dir = "out";
};

[[nodiscard]] RunConfig run_config_from_json(const std::string& text);
[[nodiscard]] std::string run_config_to_json(const RunConfig& config);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);

[[nodiscard]] bool operator==(const RunConfig::Problem&,
                              const RunConfig::Problem&);
[[nodiscard]] bool operator==(const RunConfig::RegionSpec&,
                              const RunConfig::RegionSpec&);
[[nodiscard]] bool operator==(const RunConfig&, const RunConfig&);

/// Materializes the configured problem and region.
[[nodiscard]] ProblemPreset instantiate(const RunConfig& config);

/// Runs one subcommand ("integrate", "degree", "verify-formula",
/// "verify-averaging", "scan-boundary", "find-periodic", "branching",
/// "check-hypotheses") against a config, writing report.json (and
/// trajectory.csv where applicable) plus run_meta.json into the output
/// directory.  Returns the process exit status: 0 pass/found, 1 fail /
/// not found (diagnostics in the report), 2 configuration or
/// admissibility error.
int run(const std::string& command, const RunConfig& config, bool quiet);

}  // namespace flowdeg
