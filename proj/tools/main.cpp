#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "flowdeg/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "flowdeg: topological degrees, averaging and T-periodic solutions of "
      "semilinear systems u' = -A u + F(t, u) with a contractive linear "
      "part"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  int steps = 0;
  bool quiet = false;

  app.add_option("--config", config_path,
                 "JSON run configuration (omitted: the txline-default "
                 "preset)");
  app.add_option("--output", output_dir,
                 "output directory override (default from the config)");
  auto* seed_option =
      app.add_option("--seed", seed, "sampling seed override");
  auto* steps_option = app.add_option(
      "--steps", steps, "fixed integrator step-count override");
  app.add_flag("--quiet", quiet, "suppress the one-line summary");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"integrate", "integrate the mild solution over [0, horizon]"},
      {"degree", "static degree of the time-averaged field over the region"},
      {"verify-formula",
       "check deg(I - flow_t) = Deg(-A + F) over a t schedule"},
      {"verify-averaging",
       "check deg(I - flow_T^lambda) = Deg(-A + F_avg) over a lambda "
       "schedule"},
      {"scan-boundary",
       "sweep the region boundary for T-periodic points (falsification)"},
      {"find-periodic",
       "find and certify a T-periodic solution inside the region"},
      {"branching",
       "track periodic points along a decreasing lambda schedule"},
      {"check-hypotheses",
       "evaluate the structural hypotheses of the configured problem"},
  };
  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int parse_code = app.exit(e);
    return parse_code == 0 ? 0 : 2;
  }

  try {
    flowdeg::RunConfig config;
    if (!config_path.empty()) {
      config = flowdeg::load_run_config(config_path);
    } else {
      config.problem.preset = "txline-default";
    }
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (seed_option->count() > 0) config.seed = seed;
    if (steps_option->count() > 0) config.steps = steps;
    const std::string command = app.get_subcommands().front()->get_name();
    return flowdeg::run(command, config, quiet);
  } catch (const flowdeg::Error& e) {
    if (!quiet) std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    if (!quiet) std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
