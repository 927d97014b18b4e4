#include "flowdeg/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "json_util.hpp"

namespace flowdeg {

namespace {

using Verdict = FormulaReport::Verdict;

Vector region_center(const Region& region) {
  if (region.kind() == Region::Kind::box) {
    return (0.5 * (region.lower() + region.upper())).eval();
  }
  return region.center();
}

/// Step count the refinement loop settles on for the flow from `probe`;
/// all subsequent evaluations of the same flow map reuse it fixed, so the
/// numerical flow is a smooth deterministic map (adaptive refinement
/// inside a Newton/degree loop would make finite differences noisy).
int calibrate_flow_steps(const SemilinearProblem& problem, const Vector& probe,
                         double t, double lambda,
                         const IntegrateOptions& options) {
  return detail::translate_ex(problem, probe, t, lambda, 1.0, 0, options)
      .steps;
}

Field flow_defect_field(const SemilinearProblem& problem, double t,
                        double lambda, int steps, IntegrateOptions options) {
  options.refine = false;
  return [problem, t, lambda, steps, options](const Vector& x) {
    return (x - translate(problem, x, t, lambda, 1.0, steps, options)).eval();
  };
}

/// Degree options adjusted for the supported envelope: above dimension 10
/// the harness assumes the contraction setting (unique fixed point) and
/// caps the multistart and boundary-sampling effort.
DegreeOptions effective_degree_options(const DegreeOptions& options, int dim) {
  DegreeOptions eff = options;
  if (dim > 10) {
    if (eff.seeds == 0) eff.seeds = 16;
    if (eff.boundary_per_face == 0) {
      eff.boundary_per_face =
          std::max<std::size_t>(4, 512 / static_cast<std::size_t>(dim));
    }
  }
  return eff;
}

std::vector<double> default_t_schedule(const SemilinearProblem& problem,
                                       const Region& region,
                                       std::vector<std::string>* diagnostics) {
  const double rho = 0.25 * region.diameter();
  const Region safety = region.inflated(rho);
  const Matrix& a = problem.op().matrix();
  double speed = 0.0;
  for (std::size_t i = 0; i < 128; ++i) {
    const Vector x = safety.interior_point(i);
    speed = std::max(speed, (a * x - problem.f(0.0, x, 1.0)).norm());
  }
  const double tbar = std::min(
      local_existence_horizon(std::max(speed, 1e-12), rho), problem.period());
  std::vector<double> schedule;
  for (int j = 0; j < 5; ++j) schedule.push_back(tbar * std::pow(0.5, j));
  if (diagnostics != nullptr) {
    std::ostringstream note;
    note << "default t schedule from safety width " << rho
         << " and sampled speed bound " << speed << " (t_bar " << tbar << ")";
    diagnostics->push_back(note.str());
  }
  return schedule;
}

std::vector<double> default_lambda_schedule() {
  std::vector<double> schedule;
  for (int j = 2; j <= 7; ++j) schedule.push_back(std::pow(0.5, j));
  return schedule;
}

void append_uncertified(const DegreeResult& result, const std::string& where,
                        std::vector<std::string>* diagnostics) {
  std::ostringstream note;
  note << where << ": degree not certified";
  for (const auto& d : result.diagnostics) note << "; " << d;
  diagnostics->push_back(note.str());
}

/// Shared schedule loop of the two formula harnesses: `flow(entry)` builds
/// the fixed-point defect field of one schedule entry.
void run_flow_schedule(
    FormulaReport& report, const std::vector<double>& schedule,
    const DegreeOptions& degree_options, const Region& region,
    const char* entry_name, bool static_certified,
    const std::function<Field(double)>& flow) {
  bool all_match = true;
  bool all_certified = static_certified;
  for (const double entry : schedule) {
    try {
      const Field field = flow(entry);
      const DegreeResult result = brouwer_degree(field, region, degree_options);
      report.degrees_flow.push_back(result.value);
      report.margins.push_back(result.boundary_margin);
      if (!result.certified) {
        std::ostringstream where;
        where << "flow degree at " << entry_name << " " << entry;
        append_uncertified(result, where.str(), &report.diagnostics);
        all_certified = false;
      }
      if (result.value != report.degree_static) {
        std::ostringstream note;
        note << "degree mismatch at " << entry_name << " " << entry << ": flow "
             << result.value << " vs static " << report.degree_static;
        report.diagnostics.push_back(note.str());
        all_match = false;
      }
    } catch (const InadmissibleFieldError& e) {
      std::ostringstream note;
      note << "flow field inadmissible at " << entry_name << " " << entry
           << ": " << e.what();
      report.diagnostics.push_back(note.str());
      report.verdict = Verdict::inadmissible;
      return;
    } catch (const Error& e) {
      std::ostringstream note;
      note << "flow degree failed at " << entry_name << " " << entry << ": "
           << e.what();
      report.diagnostics.push_back(note.str());
      report.verdict = Verdict::fail;
      return;
    }
  }
  report.verdict = (all_match && all_certified) ? Verdict::pass : Verdict::fail;
}

struct ClosureSolve {
  Vector state;
  double defect = std::numeric_limits<double>::infinity();
  std::string solver;
  std::vector<double> defects;
  int steps = 0;
};

/// Picard iteration x <- Phi(x) of the fixed-step numerical flow.
bool picard_closure(const SemilinearProblem& problem, double horizon,
                    double lambda, const IntegrateOptions& fixed,
                    const FindPeriodicOptions& options, ClosureSolve& out) {
  Vector x = out.state;
  double defect = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < options.picard_max_iterations; ++iter) {
    const Vector next =
        translate(problem, x, horizon, lambda, 1.0, out.steps, fixed);
    defect = problem.op().weighted_norm(next - x);
    out.defects.push_back(defect);
    x = next;
    if (defect <= options.target_defect) break;
  }
  out.state = x;
  out.defect = defect;
  return defect <= options.target_defect;
}

/// Damped Newton on G(x) = x - Phi(x) with a central finite-difference
/// Jacobian of the fixed-step numerical flow.
bool newton_closure(const SemilinearProblem& problem, double horizon,
                    double lambda, const IntegrateOptions& fixed,
                    const FindPeriodicOptions& options, ClosureSolve& out) {
  const auto flow = [&](const Vector& y) {
    return translate(problem, y, horizon, lambda, 1.0, out.steps, fixed);
  };
  const LinearOperator& op = problem.op();
  const int n = static_cast<int>(out.state.size());
  Vector x = out.state;
  double defect = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < options.newton_max_iterations; ++iter) {
    const Vector fx = flow(x);
    const Vector g = x - fx;
    defect = op.weighted_norm(g);
    out.defects.push_back(defect);
    if (defect <= options.target_defect) {
      out.state = x;
      out.defect = defect;
      return true;
    }
    const double h =
        std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + x.norm());
    Matrix jac(n, n);
    for (int j = 0; j < n; ++j) {
      Vector xp = x;
      Vector xm = x;
      xp(j) += h;
      xm(j) -= h;
      jac.col(j) = ((xp - flow(xp)) - (xm - flow(xm))) / (2.0 * h);
    }
    Eigen::PartialPivLU<Matrix> lu(jac);
    if (!(lu.rcond() > 1e-15)) break;
    const Vector step = lu.solve(g);
    const double g0 = g.norm();
    double s = 1.0;
    bool accepted = false;
    while (s >= 1e-4) {
      const Vector candidate = x - s * step;
      if ((candidate - flow(candidate)).norm() <= (1.0 - 0.25 * s) * g0) {
        x = candidate;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) x -= 1e-4 * step;
  }
  const Vector fx = flow(x);
  defect = op.weighted_norm(x - fx);
  if (defect < out.defect || out.defects.empty()) {
    out.state = x;
    out.defect = defect;
  }
  return defect <= options.target_defect;
}

/// Residual tolerance for solving the closure equation: the fixed point of
/// the numerical flow is offset from the exact one by roughly the
/// integration residual divided by (1 - contraction ratio), so the
/// tolerance shrinks with the spectral gap.
double closure_tolerance(double base, double contraction_ratio) {
  if (contraction_ratio < 1.0) {
    return std::min(base, std::max(1e-12, 1e-8 * (1.0 - contraction_ratio)));
  }
  return std::min(base, 1e-10);
}

}  // namespace

std::string to_string(FormulaReport::Verdict verdict) {
  switch (verdict) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::inadmissible:
      return "inadmissible";
  }
  return "fail";
}

FormulaReport verify_krasnoselskii(const SemilinearProblem& input,
                                   const Region& region,
                                   std::vector<double> t_schedule,
                                   const HarnessOptions& options) {
  if (region.dim() != input.op().dim()) {
    throw DomainError("region dimension does not match the state space");
  }
  FormulaReport report;
  report.theorem = "krasnoselskii";
  report.nu = options.nu;

  SemilinearProblem problem = input;
  if (!input.autonomous()) {
    problem = averaged_problem(input, options.averaging_nodes);
    report.diagnostics.push_back(
        "non-autonomous field: applying the identity to its time average");
  }

  const DegreeOptions deg =
      effective_degree_options(options.degree, region.dim());
  const Field static_field = [problem](const Vector& x) {
    return problem.f(0.0, x, 1.0);
  };
  DegreeResult statics;
  try {
    statics =
        degree_resolvent(problem.op(), static_field, region, options.nu, deg);
  } catch (const InadmissibleFieldError& e) {
    report.verdict = Verdict::inadmissible;
    report.diagnostics.push_back(std::string("static field: ") + e.what());
    return report;
  }
  report.degree_static = statics.value;
  report.margin_static = statics.boundary_margin;
  if (!statics.certified) {
    append_uncertified(statics, "static degree", &report.diagnostics);
  }

  if (t_schedule.empty()) {
    t_schedule = default_t_schedule(problem, region, &report.diagnostics);
  }
  for (const double t : t_schedule) {
    if (!(t > 0.0)) throw DomainError("t schedule entries must be positive");
  }
  report.schedule = t_schedule;

  const Vector probe = region_center(region);
  run_flow_schedule(report, t_schedule, deg, region, "t", statics.certified,
                    [&](double t) {
                      const int steps = calibrate_flow_steps(
                          problem, probe, t, 1.0, options.integrate);
                      return flow_defect_field(problem, t, 1.0, steps,
                                               options.integrate);
                    });
  return report;
}

FormulaReport verify_averaging(const SemilinearProblem& problem,
                               const Region& region,
                               std::vector<double> lambda_schedule,
                               const HarnessOptions& options) {
  if (region.dim() != problem.op().dim()) {
    throw DomainError("region dimension does not match the state space");
  }
  if (!problem.periodic()) {
    throw DomainError("the averaging identity needs a T-periodic field");
  }
  FormulaReport report;
  report.theorem = "averaging";
  report.nu = options.nu;

  const auto averaged = std::make_shared<AveragedField>(
      average_field(problem, options.averaging_nodes));
  {
    std::ostringstream note;
    note << "averaged field over " << averaged->nodes()
         << " quadrature nodes (node-doubling error estimate "
         << averaged->error_estimate() << ")";
    report.diagnostics.push_back(note.str());
  }

  const DegreeOptions deg =
      effective_degree_options(options.degree, region.dim());
  const Field static_field = [averaged](const Vector& x) {
    return (*averaged)(x);
  };
  DegreeResult statics;
  try {
    statics =
        degree_resolvent(problem.op(), static_field, region, options.nu, deg);
  } catch (const InadmissibleFieldError& e) {
    report.verdict = Verdict::inadmissible;
    report.diagnostics.push_back(std::string("averaged field: ") + e.what());
    return report;
  }
  report.degree_static = statics.value;
  report.margin_static = statics.boundary_margin;
  if (!statics.certified) {
    append_uncertified(statics, "static degree", &report.diagnostics);
  }

  if (lambda_schedule.empty()) lambda_schedule = default_lambda_schedule();
  for (const double lambda : lambda_schedule) {
    if (!(lambda > 0.0)) {
      throw DomainError("lambda schedule entries must be positive");
    }
  }
  report.schedule = lambda_schedule;

  const double period = problem.period();
  const Vector probe = region_center(region);
  run_flow_schedule(report, lambda_schedule, deg, region, "lambda",
                    statics.certified,
                    [&](double lambda) {
                      const int steps = calibrate_flow_steps(
                          problem, probe, period, lambda, options.integrate);
                      return flow_defect_field(problem, period, lambda, steps,
                                               options.integrate);
                    });
  return report;
}

BoundaryScan scan_boundary_periodic_points(const SemilinearProblem& problem,
                                           const Region& region,
                                           std::vector<double> lambda_grid,
                                           std::size_t boundary_samples,
                                           const HarnessOptions& options) {
  if (region.dim() != problem.op().dim()) {
    throw DomainError("region dimension does not match the state space");
  }
  if (lambda_grid.empty()) lambda_grid = {1.0};
  for (const double lambda : lambda_grid) {
    if (!(lambda > 0.0)) throw DomainError("lambda grid must be positive");
  }
  const int dim = region.dim();
  if (boundary_samples == 0) {
    boundary_samples = std::max<std::size_t>(64, 16 * dim);
  }
  const std::size_t faces = region.kind() == Region::Kind::box
                                ? 2 * static_cast<std::size_t>(dim)
                                : static_cast<std::size_t>(dim);
  const std::size_t per_face =
      std::max<std::size_t>(1, boundary_samples / faces);
  const std::vector<Vector> points = region.boundary_points(per_face);

  const LinearOperator& op = problem.op();
  double scale = 0.0;
  for (const Vector& x : points) scale = std::max(scale, op.weighted_norm(x));

  BoundaryScan scan;
  scan.threshold = 1e-6 * (1.0 + scale);
  scan.min_defect = std::numeric_limits<double>::infinity();
  scan.lambda_grid = lambda_grid;

  const double period = problem.period();
  for (const double lambda : lambda_grid) {
    IntegrateOptions fixed = options.integrate;
    const int steps =
        calibrate_flow_steps(problem, points.empty() ? region_center(region)
                                                     : points.front(),
                             period, lambda, options.integrate);
    fixed.refine = false;
    double lambda_min = std::numeric_limits<double>::infinity();
    for (const Vector& x : points) {
      const Vector mapped =
          translate(problem, x, period, lambda, 1.0, steps, fixed);
      const double defect = op.weighted_norm(mapped - x);
      lambda_min = std::min(lambda_min, defect);
      if (defect < scan.min_defect) {
        scan.min_defect = defect;
        scan.argmin_state = x;
        scan.argmin_lambda = lambda;
      }
    }
    scan.min_defect_per_lambda.push_back(lambda_min);
  }
  scan.flagged = scan.min_defect < scan.threshold;
  return scan;
}

PeriodicSolution find_periodic(const SemilinearProblem& problem,
                               const Region& region,
                               const FindPeriodicOptions& options) {
  const LinearOperator& op = problem.op();
  if (region.dim() != op.dim()) {
    throw DomainError("region dimension does not match the state space");
  }
  const double period = problem.period();
  PeriodicSolution solution;

  if (options.scan_boundary) {
    solution.scan = scan_boundary_periodic_points(problem, region, {1.0}, 0,
                                                  options.harness);
  }

  // Existence certificate: nonzero static degree of the averaged field
  // (which is the field itself for autonomous problems).
  const auto averaged = std::make_shared<AveragedField>(
      average_field(problem, options.harness.averaging_nodes));
  const Field static_field = [averaged](const Vector& x) {
    return (*averaged)(x);
  };
  const DegreeOptions deg =
      effective_degree_options(options.harness.degree, region.dim());
  const DegreeResult certificate =
      degree_resolvent(op, static_field, region, options.harness.nu, deg);
  solution.degree = certificate.value;
  solution.degree_certified = certificate.certified;
  if (certificate.value == 0) {
    throw NoCertificateError(
        "the static degree over the region is 0: no periodic solution is "
        "certified there");
  }

  const double omega = op.decay_rate();
  const double ratio = std::exp(period * (problem.lipschitz() - omega));
  IntegrateOptions iopts = options.harness.integrate;
  iopts.tolerance = closure_tolerance(iopts.tolerance, ratio);

  ClosureSolve solve;
  solve.state = region_center(region);
  solve.steps =
      calibrate_flow_steps(problem, solve.state, period, 1.0, iopts);
  IntegrateOptions fixed = iopts;
  fixed.refine = false;

  bool found = false;
  if (ratio <= options.picard_max_ratio) {
    solve.solver = "picard";
    found = picard_closure(problem, period, 1.0, fixed, options, solve);
  } else {
    solve.solver = "newton";
    double best = std::numeric_limits<double>::infinity();
    Vector best_state = solve.state;
    for (std::size_t start = 0; start < options.newton_starts && !found;
         ++start) {
      solve.state = start == 0 ? region_center(region)
                               : region.interior_point(start - 1);
      found = newton_closure(problem, period, 1.0, fixed, options, solve);
      if (solve.defect < best) {
        best = solve.defect;
        best_state = solve.state;
      }
    }
    if (!found) {
      solve.defect = best;
      solve.state = best_state;
    }
  }
  solution.solver = solve.solver;
  solution.solver_defects = solve.defects;
  if (!found) {
    std::ostringstream msg;
    msg << solve.solver << " did not reach the closure target "
        << options.target_defect << " (best defect " << solve.defect << ")";
    throw SolverError(msg.str(), solve.defect);
  }
  if (!region.contains(solve.state)) {
    throw SolverError("the closure solver converged outside the region",
                      solve.defect);
  }

  solution.initial_state = solve.state;
  solution.trajectory =
      integrate_mild(problem, solve.state, period, 1.0, 1.0, solve.steps,
                     fixed);
  solution.closure_defect = op.weighted_norm(
      solution.trajectory.final_state() - solution.trajectory.initial_state());
  if (problem.bound() && omega > 0.0) {
    solution.norm_bound_ok =
        op.weighted_norm(solve.state) <= *problem.bound() / omega + 1e-6;
  }
  return solution;
}

BranchingTrack track_branching(const SemilinearProblem& problem,
                               const Region& region,
                               std::vector<double> lambda_schedule,
                               const FindPeriodicOptions& options) {
  const LinearOperator& op = problem.op();
  if (region.dim() != op.dim()) {
    throw DomainError("region dimension does not match the state space");
  }
  if (!problem.periodic()) {
    throw DomainError("branching tracks need a T-periodic field");
  }
  if (lambda_schedule.empty()) lambda_schedule = default_lambda_schedule();
  for (const double lambda : lambda_schedule) {
    if (!(lambda > 0.0)) {
      throw DomainError("lambda schedule entries must be positive");
    }
  }

  BranchingTrack track;
  const auto averaged = std::make_shared<AveragedField>(
      average_field(problem, options.harness.averaging_nodes));
  const double period = problem.period();
  const double omega = op.decay_rate();
  const double lipschitz = problem.lipschitz();

  Vector warm = region_center(region);
  for (const double lambda : lambda_schedule) {
    const double ratio = std::exp(lambda * period * (lipschitz - omega));
    IntegrateOptions iopts = options.harness.integrate;
    iopts.tolerance = closure_tolerance(iopts.tolerance, ratio);
    try {
      ClosureSolve solve;
      solve.state = warm;
      solve.steps =
          calibrate_flow_steps(problem, warm, period, lambda, iopts);
      IntegrateOptions fixed = iopts;
      fixed.refine = false;
      bool found = false;
      if (ratio <= options.picard_max_ratio) {
        solve.solver = "picard";
        found = picard_closure(problem, period, lambda, fixed, options, solve);
      } else {
        solve.solver = "newton";
        found = newton_closure(problem, period, lambda, fixed, options, solve);
      }
      if (!found) {
        std::ostringstream msg;
        msg << solve.solver << " lost the fixed point at lambda " << lambda
            << " (best defect " << solve.defect << ")";
        throw SolverError(msg.str(), solve.defect);
      }
      if (!region.contains(solve.state)) {
        std::ostringstream msg;
        msg << "periodic point left the region at lambda " << lambda;
        throw SolverError(msg.str(), solve.defect);
      }
      BranchPoint point;
      point.lambda = lambda;
      point.state = solve.state;
      point.closure_defect = solve.defect;
      point.residual = op.weighted_norm(-(op.matrix() * solve.state) +
                                        (*averaged)(solve.state));
      track.points.push_back(std::move(point));
      warm = track.points.back().state;
    } catch (const Error& e) {
      std::ostringstream note;
      note << "continuation stopped at lambda " << lambda << ": " << e.what();
      track.diagnostics.push_back(note.str());
      break;
    }
  }

  track.complete = track.points.size() == lambda_schedule.size();
  if (!track.points.empty()) {
    track.residuals_monotone = true;
    for (std::size_t k = 1; k < track.points.size(); ++k) {
      if (track.points[k].residual > 1.1 * track.points[k - 1].residual) {
        track.residuals_monotone = false;
        break;
      }
    }
    track.final_residual_small = track.points.back().residual <=
                                 1e-4 * (track.points.front().residual + 1.0);
    if (track.points.size() >= 2) {
      const auto& last = track.points[track.points.size() - 1];
      const auto& prev = track.points[track.points.size() - 2];
      const double r = prev.lambda / last.lambda;
      if (r > 1.0) {
        // x(lambda) = x* + c lambda^2 + O(lambda^4) for forcings even in t,
        // so one Richardson step on the halving schedule removes the
        // quadratic deviation.
        track.extrapolated_limit =
            last.state + (last.state - prev.state) / (r * r - 1.0);
      } else {
        track.extrapolated_limit = last.state;
      }
    } else {
      track.extrapolated_limit = track.points.back().state;
    }
  }
  return track;
}

std::string formula_report_to_json(const FormulaReport& report) {
  detail::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "formula";
  j["theorem"] = report.theorem;
  j["verdict"] = to_string(report.verdict);
  j["nu"] = report.nu;
  j["degree_static"] = report.degree_static;
  j["margin_static"] = report.margin_static;
  j["schedule"] = report.schedule;
  j["degrees_flow"] = report.degrees_flow;
  j["margins"] = report.margins;
  j["diagnostics"] = report.diagnostics;
  return j.dump(2);
}

std::string periodic_solution_to_json(const PeriodicSolution& solution) {
  detail::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "periodic-solution";
  j["initial_state"] = detail::to_json_array(solution.initial_state);
  j["closure_defect"] = solution.closure_defect;
  j["degree"] = solution.degree;
  j["degree_certified"] = solution.degree_certified;
  j["solver"] = solution.solver;
  j["solver_defects"] = solution.solver_defects;
  if (solution.norm_bound_ok) {
    j["norm_bound_ok"] = *solution.norm_bound_ok;
  } else {
    j["norm_bound_ok"] = nullptr;
  }
  detail::ordered_json trajectory;
  trajectory["steps"] = solution.trajectory.steps();
  trajectory["horizon"] = solution.trajectory.horizon();
  trajectory["residual"] = solution.trajectory.residual;
  trajectory["apriori_ok"] = solution.trajectory.apriori_ok;
  j["trajectory"] = std::move(trajectory);
  j["scan"] = detail::ordered_json::parse(boundary_scan_to_json(solution.scan));
  return j.dump(2);
}

std::string boundary_scan_to_json(const BoundaryScan& scan) {
  detail::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "boundary-scan";
  j["min_defect"] = scan.min_defect;
  j["argmin_state"] = detail::to_json_array(scan.argmin_state);
  j["argmin_lambda"] = scan.argmin_lambda;
  j["threshold"] = scan.threshold;
  j["flagged"] = scan.flagged;
  j["lambda_grid"] = scan.lambda_grid;
  j["min_defect_per_lambda"] = scan.min_defect_per_lambda;
  return j.dump(2);
}

std::string branching_track_to_json(const BranchingTrack& track) {
  detail::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "branching";
  j["complete"] = track.complete;
  j["residuals_monotone"] = track.residuals_monotone;
  j["final_residual_small"] = track.final_residual_small;
  j["extrapolated_limit"] = detail::to_json_array(track.extrapolated_limit);
  detail::ordered_json points = detail::ordered_json::array();
  for (const auto& point : track.points) {
    detail::ordered_json p;
    p["lambda"] = point.lambda;
    p["residual"] = point.residual;
    p["closure_defect"] = point.closure_defect;
    p["state"] = detail::to_json_array(point.state);
    points.push_back(std::move(p));
  }
  j["points"] = std::move(points);
  j["diagnostics"] = track.diagnostics;
  return j.dump(2);
}

}  // namespace flowdeg
