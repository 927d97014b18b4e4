#pragma once

#include <map>
#include <string>

#include "flowdeg/evolve.hpp"
#include "flowdeg/region.hpp"

namespace flowdeg {

/// Lossy transmission line driven through a nonlinear resistive-capacitive
/// termination.  The distributed state is the current/voltage pair
/// (p, q) on (0, l), the lumped state the termination voltage r; the
/// state space carries the weighted product
///   gamma <p1,p2> + alpha <q1,q2> + alpha gamma sigma r1 r2.
struct TransmissionLineParams {
  double alpha = 1.0;   ///< line inductance scale
  double gamma = 1.0;   ///< line capacitance scale
  double beta = 1.0;    ///< series loss rate
  double delta = 1.0;   ///< shunt loss rate
  double sigma = 0.1;   ///< termination capacitance
  double rho = 1.0;     ///< input termination resistance (> 0)
  double a = 0.12;      ///< affine slope of the termination conductance
  double b = 0.02;      ///< envelope: |h(s) - a s| <= b
  double length = 1.0;  ///< line length l
  double period = 1.0;  ///< forcing period T
  double lip_f = 0.3;   ///< declared Lipschitz budget of f
  double lip_g = 0.3;   ///< declared Lipschitz budget of g
  double lip_h = 0.14;  ///< Lipschitz constant of h
  /// Amplitudes of the t-dependent parts (even in t: cosine phases).
  double forcing_f = 0.05;
  double forcing_g = 0.05;
  double amp_e = 0.1;  ///< termination voltage bias e(t) amplitude
  double amp_j = 0.1;  ///< termination current bias j(t) amplitude
  /// Amplitudes of the state-dependent parts of f and g (tanh couplings;
  /// their Lipschitz constant amp*sqrt(2) must stay within lip_f / lip_g).
  double coupling_f = 0.15;
  double coupling_g = 0.15;

  friend bool operator==(const TransmissionLineParams&,
                         const TransmissionLineParams&) = default;
};

/// Galerkin transmission-line problem on n grid cells (state dimension
/// 2n + 1): upwind first differences aligned with the characteristic
/// directions of the (p, q) subsystem, boundary conditions eliminated into
/// the end rows, diagonal quadrature weight.  The discrete operator
/// satisfies the same coercivity bound min{beta, delta, a/sigma} as the
/// distributed model (checked in tests).  Throws HypothesisError naming
/// the violated inequality when the parameters break the structural
/// conditions.
[[nodiscard]] SemilinearProblem build_transmission_line(
    const TransmissionLineParams& params, int n);

/// Structural inequalities behind the transmission-line construction,
/// evaluated without building anything (reports, never throws).
struct HypothesisEntry {
  std::string name;
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  std::string detail;
};

struct HypothesisReport {
  std::vector<HypothesisEntry> entries;
  bool all_pass = false;
};

/// Checks the declared constants of any problem by deterministic sampling
/// (10^4 pseudo-random pairs, radius min(1e3, sample_radius), fixed seed):
/// semigroup decay omega > 0, Lipschitz and growth quotients within the
/// declarations, the bound K when declared, Lipschitz-vs-decay L_F <
/// omega, and periodicity of the forcing.
[[nodiscard]] HypothesisReport check_hypotheses(
    const SemilinearProblem& problem, std::uint64_t seed = 0x5EED);

/// check_hypotheses for a transmission-line parameter set: the sampled
/// checks plus the named structural inequalities ("affine-envelope",
/// "lipschitz-budget", "feedback-slope").
[[nodiscard]] HypothesisReport check_hypotheses(
    const TransmissionLineParams& params, int n = 16,
    std::uint64_t seed = 0x5EED);

/// 1-D heat strip with zero boundary values on a width-l interval,
/// standard 3-point Laplacian on n interior points, quadrature weight
/// h = l/(n+1).  The decay rate is the exact smallest discrete eigenvalue
/// 4 (n+1)^2 / l^2 * sin^2(pi / (2(n+1))) (n = 1, l = 1: exactly 8;
/// n -> infinity: pi^2 / l^2).
[[nodiscard]] SemilinearProblem build_heat_strip(double length, int n,
                                                 Nonlinearity f,
                                                 double lipschitz,
                                                 double growth,
                                                 std::optional<double> bound,
                                                 bool autonomous = true);

/// A named built-in problem with its default working region.
struct ProblemPreset {
  SemilinearProblem problem;
  Region region;
};

/// Built-in presets: "scalar-linear", "scalar-forced", "cubic-2d",
/// "heat-1d", "txline-default".  Throws ConfigError for unknown names.
[[nodiscard]] ProblemPreset make_preset(const std::string& name);

[[nodiscard]] std::vector<std::string> preset_names();

/// JSON (text) serialization of a hypothesis report, schema version 1.
[[nodiscard]] std::string hypothesis_report_to_json(
    const HypothesisReport& report);

}  // namespace flowdeg
