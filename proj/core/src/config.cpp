#include "flowdeg/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "flowdeg/degree.hpp"
#include "flowdeg/periodic.hpp"
#include "json_util.hpp"

namespace flowdeg {

namespace {

namespace fs = std::filesystem;
using detail::ordered_json;

Vector to_vector(const std::vector<double>& values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = values[i];
  }
  return v;
}

TransmissionLineParams txline_from_json(const ordered_json& j) {
  TransmissionLineParams t;
  t.alpha = j.value("alpha", t.alpha);
  t.gamma = j.value("gamma", t.gamma);
  t.beta = j.value("beta", t.beta);
  t.delta = j.value("delta", t.delta);
  t.sigma = j.value("sigma", t.sigma);
  t.rho = j.value("rho", t.rho);
  t.a = j.value("a", t.a);
  t.b = j.value("b", t.b);
  t.length = j.value("length", t.length);
  t.period = j.value("period", t.period);
  t.lip_f = j.value("lip_f", t.lip_f);
  t.lip_g = j.value("lip_g", t.lip_g);
  t.lip_h = j.value("lip_h", t.lip_h);
  t.forcing_f = j.value("forcing_f", t.forcing_f);
  t.forcing_g = j.value("forcing_g", t.forcing_g);
  t.amp_e = j.value("amp_e", t.amp_e);
  t.amp_j = j.value("amp_j", t.amp_j);
  t.coupling_f = j.value("coupling_f", t.coupling_f);
  t.coupling_g = j.value("coupling_g", t.coupling_g);
  return t;
}

ordered_json txline_to_json(const TransmissionLineParams& t) {
  ordered_json j;
  j["alpha"] = t.alpha;
  j["gamma"] = t.gamma;
  j["beta"] = t.beta;
  j["delta"] = t.delta;
  j["sigma"] = t.sigma;
  j["rho"] = t.rho;
  j["a"] = t.a;
  j["b"] = t.b;
  j["length"] = t.length;
  j["period"] = t.period;
  j["lip_f"] = t.lip_f;
  j["lip_g"] = t.lip_g;
  j["lip_h"] = t.lip_h;
  j["forcing_f"] = t.forcing_f;
  j["forcing_g"] = t.forcing_g;
  j["amp_e"] = t.amp_e;
  j["amp_j"] = t.amp_j;
  j["coupling_f"] = t.coupling_f;
  j["coupling_g"] = t.coupling_g;
  return j;
}

Region build_region(const RunConfig::RegionSpec& spec,
                    const SemilinearProblem& problem) {
  const auto dim = problem.op().dim();
  if (spec.kind == "box") {
    if (static_cast<Eigen::Index>(spec.lower.size()) != dim ||
        static_cast<Eigen::Index>(spec.upper.size()) != dim) {
      throw ConfigError("region: box bounds must match the state dimension");
    }
    return Region::box(to_vector(spec.lower), to_vector(spec.upper));
  }
  if (spec.kind == "ball") {
    Vector center = spec.center.empty() ? Vector::Zero(dim).eval()
                                        : to_vector(spec.center);
    if (center.size() != dim) {
      throw ConfigError("region: ball center must match the state dimension");
    }
    if (spec.weighted) {
      return Region::ball(std::move(center), spec.radius,
                          problem.op().weight());
    }
    return Region::ball(std::move(center), spec.radius);
  }
  throw ConfigError("region.kind must be \"box\" or \"ball\"");
}

SemilinearProblem problem_from_operator_file(const RunConfig::Problem& spec) {
  Matrix a = load_matrix(spec.operator_file);
  LinearOperator op =
      spec.weight_file.empty()
          ? LinearOperator(std::move(a))
          : LinearOperator(std::move(a), load_matrix(spec.weight_file));
  const auto dim = op.dim();

  Nonlinearity f;
  double lipschitz = spec.lipschitz;
  double growth = spec.growth;
  std::optional<double> bound = spec.bound;
  if (spec.nonlinearity == "zero") {
    f = [dim](double, const Vector&, double) {
      return Vector::Zero(dim).eval();
    };
    if (!bound) bound = 0.0;
  } else if (spec.nonlinearity == "constant") {
    Vector value;
    if (!spec.nl_vector.empty()) {
      value = to_vector(spec.nl_vector);
      if (value.size() != dim) {
        throw ConfigError("problem.nl_vector must match the state dimension");
      }
    } else {
      value = Vector::Constant(dim, spec.nl_value);
    }
    const double norm = op.weighted_norm(value);
    f = [value](double, const Vector&, double) { return value; };
    if (growth == 0.0) growth = norm;
    if (!bound) bound = norm;
  } else if (spec.nonlinearity == "tanh") {
    const double amplitude = spec.nl_value;
    f = [amplitude](double, const Vector& x, double) {
      return (amplitude * x.array().tanh()).matrix().eval();
    };
    if (lipschitz == 0.0) lipschitz = std::abs(amplitude);
    if (growth == 0.0) growth = std::abs(amplitude);
  } else {
    throw ConfigError("problem.nonlinearity must be \"zero\", \"constant\" "
                      "or \"tanh\"");
  }

  SemilinearProblem::Constants constants;
  constants.period = spec.period;
  constants.lipschitz = lipschitz;
  constants.growth = growth;
  constants.bound = bound;
  constants.periodic = true;
  constants.autonomous = true;
  return SemilinearProblem(std::move(op), std::move(f), constants,
                           "operator-file");
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
      dynamic_cast<const DomainError*>(&e) != nullptr ||
      dynamic_cast<const OperatorError*>(&e) != nullptr ||
      dynamic_cast<const HypothesisError*>(&e) != nullptr ||
      dynamic_cast<const InadmissibleFieldError*>(&e) != nullptr ||
      dynamic_cast<const SingularResolventError*>(&e) != nullptr) {
    return 2;
  }
  return 1;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text << '\n';
  if (!out) throw ConfigError("short write to " + path.string());
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

double finite_or_zero(double v, bool* finite) {
  if (std::isfinite(v)) {
    *finite = true;
    return v;
  }
  *finite = false;
  return 0.0;
}

std::string trajectory_report(const Trajectory& trajectory,
                              const std::string& csv_name) {
  ordered_json j;
  j["schema"] = 1;
  j["kind"] = "trajectory";
  j["steps"] = trajectory.steps();
  j["horizon"] = trajectory.horizon();
  j["lambda"] = trajectory.lambda;
  j["mu"] = trajectory.mu;
  j["residual"] = trajectory.residual;
  j["tolerance"] = trajectory.tolerance;
  j["refined"] = trajectory.refined;
  bool finite = false;
  const double bound = finite_or_zero(trajectory.apriori_bound, &finite);
  if (finite) {
    j["apriori_bound"] = bound;
  } else {
    j["apriori_bound"] = nullptr;
  }
  j["apriori_ok"] = trajectory.apriori_ok;
  j["initial_state"] = detail::to_json_array(trajectory.initial_state());
  j["final_state"] = detail::to_json_array(trajectory.final_state());
  j["csv"] = csv_name;
  return j.dump(2);
}

}  // namespace

RunConfig run_config_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    RunConfig c;
    c.schema = j.value("schema", 1);
    if (c.schema != 1) {
      throw ConfigError("unsupported config schema " +
                        std::to_string(c.schema));
    }
    if (j.contains("problem")) {
      const auto& p = j.at("problem");
      c.problem.preset = p.value("preset", std::string{});
      if (p.contains("txline") && !p.at("txline").is_null()) {
        c.problem.txline = txline_from_json(p.at("txline"));
      }
      c.problem.txline_n = p.value("txline_n", c.problem.txline_n);
      c.problem.operator_file =
          p.value("operator_file", std::string{});
      c.problem.weight_file = p.value("weight_file", std::string{});
      c.problem.nonlinearity = p.value("nonlinearity", c.problem.nonlinearity);
      c.problem.nl_value = p.value("nl_value", c.problem.nl_value);
      c.problem.nl_vector =
          p.value("nl_vector", std::vector<double>{});
      c.problem.period = p.value("period", c.problem.period);
      c.problem.lipschitz = p.value("lipschitz", c.problem.lipschitz);
      c.problem.growth = p.value("growth", c.problem.growth);
      if (p.contains("bound") && !p.at("bound").is_null()) {
        c.problem.bound = p.at("bound").get<double>();
      }
    }
    if (j.contains("region")) {
      const auto& r = j.at("region");
      c.region.kind = r.value("kind", std::string{});
      c.region.lower = r.value("lower", std::vector<double>{});
      c.region.upper = r.value("upper", std::vector<double>{});
      c.region.center = r.value("center", std::vector<double>{});
      c.region.radius = r.value("radius", c.region.radius);
      c.region.weighted = r.value("weighted", c.region.weighted);
    }
    c.t_schedule = j.value("t_schedule", std::vector<double>{});
    c.lambda_schedule = j.value("lambda_schedule", std::vector<double>{});
    c.nu = j.value("nu", c.nu);
    c.integrator_tolerance =
        j.value("integrator_tolerance", c.integrator_tolerance);
    c.seed = j.value("seed", c.seed);
    c.degree_seeds = j.value("degree_seeds", c.degree_seeds);
    c.averaging_nodes = j.value("averaging_nodes", c.averaging_nodes);
    c.x0 = j.value("x0", std::vector<double>{});
    c.horizon = j.value("horizon", c.horizon);
    c.lambda = j.value("lambda", c.lambda);
    c.mu = j.value("mu", c.mu);
    c.steps = j.value("steps", c.steps);
    c.output_dir = j.value("output_dir", c.output_dir);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
}

std::string run_config_to_json(const RunConfig& c) {
  ordered_json j;
  j["schema"] = c.schema;
  ordered_json p;
  p["preset"] = c.problem.preset;
  if (c.problem.txline) {
    p["txline"] = txline_to_json(*c.problem.txline);
  } else {
    p["txline"] = nullptr;
  }
  p["txline_n"] = c.problem.txline_n;
  p["operator_file"] = c.problem.operator_file;
  p["weight_file"] = c.problem.weight_file;
  p["nonlinearity"] = c.problem.nonlinearity;
  p["nl_value"] = c.problem.nl_value;
  p["nl_vector"] = c.problem.nl_vector;
  p["period"] = c.problem.period;
  p["lipschitz"] = c.problem.lipschitz;
  p["growth"] = c.problem.growth;
  if (c.problem.bound) {
    p["bound"] = *c.problem.bound;
  } else {
    p["bound"] = nullptr;
  }
  j["problem"] = std::move(p);
  ordered_json r;
  r["kind"] = c.region.kind;
  r["lower"] = c.region.lower;
  r["upper"] = c.region.upper;
  r["center"] = c.region.center;
  r["radius"] = c.region.radius;
  r["weighted"] = c.region.weighted;
  j["region"] = std::move(r);
  j["t_schedule"] = c.t_schedule;
  j["lambda_schedule"] = c.lambda_schedule;
  j["nu"] = c.nu;
  j["integrator_tolerance"] = c.integrator_tolerance;
  j["seed"] = c.seed;
  j["degree_seeds"] = c.degree_seeds;
  j["averaging_nodes"] = c.averaging_nodes;
  j["x0"] = c.x0;
  j["horizon"] = c.horizon;
  j["lambda"] = c.lambda;
  j["mu"] = c.mu;
  j["steps"] = c.steps;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return run_config_from_json(buffer.str());
}

bool operator==(const RunConfig::Problem& a, const RunConfig::Problem& b) {
  return a.preset == b.preset && a.txline == b.txline &&
         a.txline_n == b.txline_n && a.operator_file == b.operator_file &&
         a.weight_file == b.weight_file && a.nonlinearity == b.nonlinearity &&
         a.nl_value == b.nl_value && a.nl_vector == b.nl_vector &&
         a.period == b.period && a.lipschitz == b.lipschitz &&
         a.growth == b.growth && a.bound == b.bound;
}

bool operator==(const RunConfig::RegionSpec& a,
                const RunConfig::RegionSpec& b) {
  return a.kind == b.kind && a.lower == b.lower && a.upper == b.upper &&
         a.center == b.center && a.radius == b.radius &&
         a.weighted == b.weighted;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.schema == b.schema && a.problem == b.problem &&
         a.region == b.region && a.t_schedule == b.t_schedule &&
         a.lambda_schedule == b.lambda_schedule && a.nu == b.nu &&
         a.integrator_tolerance == b.integrator_tolerance &&
         a.seed == b.seed && a.degree_seeds == b.degree_seeds &&
         a.averaging_nodes == b.averaging_nodes && a.x0 == b.x0 &&
         a.horizon == b.horizon && a.lambda == b.lambda && a.mu == b.mu &&
         a.steps == b.steps && a.output_dir == b.output_dir;
}

ProblemPreset instantiate(const RunConfig& config) {
  std::optional<ProblemPreset> base;
  if (!config.problem.preset.empty()) {
    base = make_preset(config.problem.preset);
  } else if (config.problem.txline) {
    SemilinearProblem problem =
        build_transmission_line(*config.problem.txline, config.problem.txline_n);
    const Matrix metric = problem.op().weight();
    Region region =
        Region::ball(Vector::Zero(problem.op().dim()), 1.0, metric);
    base = ProblemPreset{std::move(problem), std::move(region)};
  } else if (!config.problem.operator_file.empty()) {
    SemilinearProblem problem = problem_from_operator_file(config.problem);
    Region region = Region::ball(Vector::Zero(problem.op().dim()), 1.0);
    base = ProblemPreset{std::move(problem), std::move(region)};
  } else {
    throw ConfigError(
        "config selects no problem: set problem.preset, problem.txline or "
        "problem.operator_file");
  }
  if (!config.region.kind.empty()) {
    base->region = build_region(config.region, base->problem);
  }
  if (base->region.dim() != base->problem.op().dim()) {
    throw ConfigError("region dimension does not match the state dimension");
  }
  return std::move(*base);
}

int run(const std::string& command, const RunConfig& config, bool quiet) {
  const fs::path dir = config.output_dir;
  std::string report_text;
  std::vector<std::string> outputs = {"report.json"};
  std::string summary;
  int code = 0;

  try {
    fs::create_directories(dir);

    HarnessOptions harness;
    harness.degree.seeds = config.degree_seeds;
    harness.integrate.tolerance = config.integrator_tolerance;
    harness.averaging_nodes = config.averaging_nodes;
    harness.nu = config.nu;

    if (command == "check-hypotheses") {
      HypothesisReport report =
          config.problem.txline
              ? check_hypotheses(*config.problem.txline,
                                 config.problem.txline_n, config.seed)
              : check_hypotheses(instantiate(config).problem, config.seed);
      report_text = hypothesis_report_to_json(report);
      code = report.all_pass ? 0 : 2;
      std::size_t failed = 0;
      for (const auto& entry : report.entries) failed += entry.pass ? 0 : 1;
      std::ostringstream s;
      s << (report.all_pass ? "all hypotheses hold" : "hypotheses violated")
        << " (" << report.entries.size() << " checks, " << failed
        << " failed)";
      summary = s.str();
    } else if (command == "integrate") {
      const ProblemPreset preset = instantiate(config);
      Vector x0 = config.x0.empty()
                      ? Vector::Zero(preset.problem.op().dim()).eval()
                      : to_vector(config.x0);
      if (x0.size() != preset.problem.op().dim()) {
        throw ConfigError("x0 does not match the state dimension");
      }
      IntegrateOptions options;
      options.tolerance = config.integrator_tolerance;
      // An explicit step count requests exactly that pass; the certifying
      // refinement loop only drives automatic stepping.
      options.refine = config.steps == 0;
      const Trajectory trajectory =
          integrate_mild(preset.problem, x0, config.horizon, config.lambda,
                         config.mu, config.steps, options);
      trajectory_to_csv(dir / "trajectory.csv", trajectory);
      outputs.push_back("trajectory.csv");
      report_text = trajectory_report(trajectory, "trajectory.csv");
      std::ostringstream s;
      s << "integrated " << trajectory.steps() << " steps to t = "
        << trajectory.horizon() << " (residual " << trajectory.residual
        << ")";
      summary = s.str();
    } else if (command == "degree") {
      const ProblemPreset preset = instantiate(config);
      const auto averaged = std::make_shared<AveragedField>(
          average_field(preset.problem, config.averaging_nodes));
      const Field field = [averaged](const Vector& x) {
        return (*averaged)(x);
      };
      const DegreeResult result =
          degree_resolvent(preset.problem.op(), field, preset.region,
                           config.nu, harness.degree);
      report_text = degree_result_to_json(result);
      code = result.certified ? 0 : 1;
      std::ostringstream s;
      s << "degree " << result.value
        << (result.certified ? " (certified)" : " (not certified)");
      summary = s.str();
    } else if (command == "verify-formula") {
      const ProblemPreset preset = instantiate(config);
      const FormulaReport report = verify_krasnoselskii(
          preset.problem, preset.region, config.t_schedule, harness);
      report_text = formula_report_to_json(report);
      code = report.verdict == FormulaReport::Verdict::pass ? 0
             : report.verdict == FormulaReport::Verdict::inadmissible ? 2
                                                                      : 1;
      summary = "krasnoselskii identity: " + to_string(report.verdict);
    } else if (command == "verify-averaging") {
      const ProblemPreset preset = instantiate(config);
      const FormulaReport report = verify_averaging(
          preset.problem, preset.region, config.lambda_schedule, harness);
      report_text = formula_report_to_json(report);
      code = report.verdict == FormulaReport::Verdict::pass ? 0
             : report.verdict == FormulaReport::Verdict::inadmissible ? 2
                                                                      : 1;
      summary = "averaging identity: " + to_string(report.verdict);
    } else if (command == "scan-boundary") {
      const ProblemPreset preset = instantiate(config);
      const BoundaryScan scan = scan_boundary_periodic_points(
          preset.problem, preset.region, config.lambda_schedule, 0, harness);
      report_text = boundary_scan_to_json(scan);
      code = scan.flagged ? 1 : 0;
      std::ostringstream s;
      s << (scan.flagged ? "possible boundary periodic point (min defect "
                         : "boundary clear (min defect ")
        << scan.min_defect << ")";
      summary = s.str();
    } else if (command == "find-periodic") {
      const ProblemPreset preset = instantiate(config);
      FindPeriodicOptions options;
      options.harness = harness;
      const PeriodicSolution solution =
          find_periodic(preset.problem, preset.region, options);
      trajectory_to_csv(dir / "trajectory.csv", solution.trajectory);
      outputs.push_back("trajectory.csv");
      report_text = periodic_solution_to_json(solution);
      std::ostringstream s;
      s << "periodic solution found (closure defect "
        << solution.closure_defect << ", degree " << solution.degree << ")";
      summary = s.str();
    } else if (command == "branching") {
      const ProblemPreset preset = instantiate(config);
      FindPeriodicOptions options;
      options.harness = harness;
      const BranchingTrack track = track_branching(
          preset.problem, preset.region, config.lambda_schedule, options);
      report_text = branching_track_to_json(track);
      const bool ok = track.complete && track.residuals_monotone &&
                      track.final_residual_small;
      code = ok ? 0 : 1;
      std::ostringstream s;
      s << "branching track " << (ok ? "converged" : "incomplete") << " ("
        << track.points.size() << " points)";
      summary = s.str();
    } else {
      throw ConfigError("unknown command \"" + command +
                        "\"; expected integrate, degree, verify-formula, "
                        "verify-averaging, scan-boundary, find-periodic, "
                        "branching or check-hypotheses");
    }
  } catch (const Error& e) {
    code = exit_code_for(e);
    ordered_json err;
    err["schema"] = 1;
    err["kind"] = "error";
    err["command"] = command;
    err["error"] = e.what();
    report_text = err.dump(2);
    summary = e.what();
  }

  try {
    fs::create_directories(dir);
    write_text(dir / "report.json", report_text);
    ordered_json meta;
    meta["schema"] = 1;
    meta["command"] = command;
    meta["generated_at"] = timestamp_utc();
    meta["seed"] = config.seed;
    meta["outputs"] = outputs;
    write_text(dir / "run_meta.json", meta.dump(2));
  } catch (const Error& e) {
    if (!quiet) std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (!quiet) {
    std::cout << "[" << command << "] " << summary << "\n";
  }
  return code;
}

}  // namespace flowdeg
