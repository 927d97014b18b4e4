#pragma once

#include "flowdeg/averaging.hpp"
#include "flowdeg/degree.hpp"
#include "flowdeg/evolve.hpp"

namespace flowdeg {

/// Options shared by the periodic-solution harnesses.
struct HarnessOptions {
  DegreeOptions degree;
  IntegrateOptions integrate;
  /// Quadrature nodes for averaged fields (0 = default 64).
  int averaging_nodes = 0;
  /// Resolvent parameter for static degrees.
  double nu = 1.0;
};

/// Outcome of a degree-formula verification over a schedule.
struct FormulaReport {
  std::string theorem;  ///< "krasnoselskii" or "averaging"
  std::vector<double> schedule;       ///< t values resp. lambda values
  std::vector<long long> degrees_flow;  ///< deg(I - flow) per entry
  long long degree_static = 0;          ///< Deg(-A + F) resp. Deg(-A + F_hat)
  std::vector<double> margins;  ///< boundary margin of the flow field per entry
  double margin_static = 0.0;
  enum class Verdict { pass, fail, inadmissible };
  Verdict verdict = Verdict::fail;
  double nu = 1.0;
  std::vector<std::string> diagnostics;
};

[[nodiscard]] std::string to_string(FormulaReport::Verdict verdict);

/// Checks the fixed-point/degree identity for autonomous problems:
/// deg(I - Phi_t, region) = Deg(-A + F, region) for every t in the
/// schedule (default: t_bar * 2^-j, j = 0..4, with t_bar the guaranteed
/// local existence horizon over an inflated safety box).
[[nodiscard]] FormulaReport verify_krasnoselskii(
    const SemilinearProblem& problem, const Region& region,
    std::vector<double> t_schedule = {}, const HarnessOptions& options = {});

/// Checks the averaging identity for periodic problems:
/// deg(I - Phi_T^lambda, region) = Deg(-A + F_hat, region) for every
/// lambda in the schedule (default 2^-2 .. 2^-7).
[[nodiscard]] FormulaReport verify_averaging(
    const SemilinearProblem& problem, const Region& region,
    std::vector<double> lambda_schedule = {},
    const HarnessOptions& options = {});

/// Boundary sweep for T-periodic points of the lambda-scaled problems.
/// A falsification heuristic: finite sampling can expose a boundary
/// periodic point (flag raised) but cannot certify absence.
struct BoundaryScan {
  double min_defect = 0.0;  ///< min ||Phi_T^lambda(x) - x|| (weighted norm)
  Vector argmin_state;
  double argmin_lambda = 0.0;
  double threshold = 0.0;
  bool flagged = false;
  std::vector<double> lambda_grid;
  std::vector<double> min_defect_per_lambda;
};

[[nodiscard]] BoundaryScan scan_boundary_periodic_points(
    const SemilinearProblem& problem, const Region& region,
    std::vector<double> lambda_grid = {}, std::size_t boundary_samples = 0,
    const HarnessOptions& options = {});

/// A certified T-periodic solution: the closure defect, the degree
/// certificate that produced it, and the solved trajectory over [0, T].
struct PeriodicSolution {
  Vector initial_state;
  Trajectory trajectory;
  double closure_defect = 0.0;  ///< ||Phi_T(x0) - x0|| (weighted norm)
  long long degree = 0;
  bool degree_certified = false;
  std::string solver;  ///< "picard" or "newton"
  std::vector<double> solver_defects;  ///< defect per iteration
  /// ||x0|| <= K / omega + 1e-6 when the problem declares a bound K.
  std::optional<bool> norm_bound_ok;
  BoundaryScan scan;
};

struct FindPeriodicOptions {
  HarnessOptions harness;
  /// Stop the solver at this closure defect.
  double target_defect = 1e-10;
  /// Picard is used when e^{lambda T (L_F - omega)} is below this ratio;
  /// otherwise damped Newton (Picard's geometric rate is impractical near
  /// contraction ratio 1).
  double picard_max_ratio = 0.9;
  std::size_t picard_max_iterations = 2000;
  std::size_t newton_starts = 16;
  std::size_t newton_max_iterations = 60;
  /// Run the boundary falsification scan first.
  bool scan_boundary = true;
};

/// Finds a T-periodic solution in `region`: boundary scan, nonzero static
/// degree certificate (else NoCertificateError), then Picard or damped
/// Newton on the closure equation x = Phi_T(x).  Throws SolverError with
/// the best defect when no fixed point is reached.
[[nodiscard]] PeriodicSolution find_periodic(
    const SemilinearProblem& problem, const Region& region,
    const FindPeriodicOptions& options = {});

/// One continuation step of the branching diagnostic.
struct BranchPoint {
  double lambda = 0.0;
  Vector state;              ///< T-periodic point of the lambda-problem
  double residual = 0.0;     ///< ||-A x + F_hat(x)|| at the point
  double closure_defect = 0.0;
};

struct BranchingTrack {
  std::vector<BranchPoint> points;
  /// Richardson extrapolation of the last two points (assumes the
  /// leading deviation order revealed by the halving schedule).
  Vector extrapolated_limit;
  bool residuals_monotone = false;  ///< non-increasing within 10% slack
  bool final_residual_small = false;  ///< final <= 1e-4 * (initial + 1)
  bool complete = false;  ///< false when the fixed point was lost midway
  std::vector<std::string> diagnostics;
};

/// Follows the T-periodic points of the lambda-scaled problems along a
/// decreasing lambda schedule (default 2^-2 .. 2^-7), recording the
/// averaged-field residual at each step; the points approach a zero of
/// -A x + F_hat(x).
[[nodiscard]] BranchingTrack track_branching(
    const SemilinearProblem& problem, const Region& region,
    std::vector<double> lambda_schedule = {},
    const FindPeriodicOptions& options = {});

/// JSON (text) serializations, schema version 1.
[[nodiscard]] std::string formula_report_to_json(const FormulaReport& report);
[[nodiscard]] std::string periodic_solution_to_json(
    const PeriodicSolution& solution);
[[nodiscard]] std::string boundary_scan_to_json(const BoundaryScan& scan);
[[nodiscard]] std::string branching_track_to_json(const BranchingTrack& track);

}  // namespace flowdeg
