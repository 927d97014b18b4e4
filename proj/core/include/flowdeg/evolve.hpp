#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flowdeg/linops.hpp"
#include "flowdeg/region.hpp"

namespace flowdeg {

namespace detail {
class PropagatorCache;
}

/// Time-dependent nonlinearity F(t, x, mu).  mu in [0,1] is the homotopy
/// parameter between a comparison field (mu = 0) and the true field
/// (mu = 1); problems that do not use it ignore the argument.
using Nonlinearity = std::function<Vector(double, const Vector&, double)>;

/// Semilinear evolution problem u' = -lambda A u + lambda F(t, u, mu) on a
/// finite-dimensional state space, with declared structural constants.
/// Values are immutable after construction; copies share the operator and
/// its propagator cache.
class SemilinearProblem {
 public:
  struct Constants {
    double period = 1.0;       ///< forcing period T > 0
    double lipschitz = 0.0;    ///< L_F: Lipschitz constant of F in x
    double growth = 0.0;       ///< c: ||F(t,x)|| <= c(1 + ||x||)
    std::optional<double> bound;  ///< K: sup ||F||, when F is bounded
    bool periodic = true;      ///< F(0,.) = F(T,.)
    bool autonomous = false;   ///< F independent of t
    /// Radius of the ball on which the declared constants were sampled /
    /// are claimed to hold (problems with locally valid constants shrink
    /// this from the 1e3 default).
    double sample_radius = 1e3;
  };

  SemilinearProblem(LinearOperator op, Nonlinearity f, Constants constants,
                    std::string name = "");

  [[nodiscard]] const LinearOperator& op() const noexcept { return *op_; }
  [[nodiscard]] Vector f(double t, const Vector& x, double mu) const;
  [[nodiscard]] double period() const noexcept { return constants_.period; }
  [[nodiscard]] double lipschitz() const noexcept {
    return constants_.lipschitz;
  }
  [[nodiscard]] double growth() const noexcept { return constants_.growth; }
  [[nodiscard]] const std::optional<double>& bound() const noexcept {
    return constants_.bound;
  }
  [[nodiscard]] bool periodic() const noexcept { return constants_.periodic; }
  [[nodiscard]] bool autonomous() const noexcept {
    return constants_.autonomous;
  }
  [[nodiscard]] double sample_radius() const noexcept {
    return constants_.sample_radius;
  }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

  /// Replaces the nonlinearity and constants, keeping the operator (and
  /// its propagator cache) shared.
  [[nodiscard]] SemilinearProblem with_field(Nonlinearity f,
                                             Constants constants,
                                             std::string name) const;

  /// Internal: shared exponential-propagator cache for the integrator.
  [[nodiscard]] detail::PropagatorCache& propagators() const noexcept {
    return *cache_;
  }

 private:
  std::shared_ptr<const LinearOperator> op_;
  Nonlinearity f_;
  Constants constants_;
  std::string name_;
  std::shared_ptr<detail::PropagatorCache> cache_;
};

/// Numerical mild solution on a uniform grid.
struct Trajectory {
  std::vector<double> times;   ///< strictly increasing, times[0] = 0
  std::vector<Vector> states;  ///< states[k] ~ u(times[k])
  double lambda = 1.0;
  double mu = 1.0;
  /// Relative Duhamel-equation defect bound over the grid (weighted norm,
  /// scaled by 1 + max state norm).
  double residual = 0.0;
  /// Tolerance the refinement loop met; 0 for fixed-step integrations.
  double tolerance = 0.0;
  bool refined = false;
  /// A-priori growth bound evaluated from the declared constants, and
  /// whether every grid state satisfied it.
  double apriori_bound = std::numeric_limits<double>::infinity();
  bool apriori_ok = true;

  [[nodiscard]] int steps() const {
    return static_cast<int>(times.size()) - 1;
  }
  [[nodiscard]] double horizon() const {
    return times.empty() ? 0.0 : times.back();
  }
  [[nodiscard]] const Vector& initial_state() const { return states.front(); }
  [[nodiscard]] const Vector& final_state() const { return states.back(); }
};

struct IntegrateOptions {
  /// Relative residual target for the step-refinement loop.
  double tolerance = 1e-8;
  /// Double the step count until the residual target is met (up to
  /// max_steps).  When false, a single fixed-step pass is performed.
  bool refine = true;
  int max_steps = 1 << 16;
  /// Weighted-norm blow-up threshold.
  double blowup = 1e12;
};

/// Integrates the mild-solution (Duhamel) recursion with an exponential
/// midpoint scheme: exact e^{-h lambda A} propagation plus a phi_1-weighted
/// midpoint quadrature of the forcing integral (second order).
///
/// steps == 0 selects ceil(256 * horizon / period), at least 16, raised if
/// needed to meet the stability guard h * lambda * L_F <= 0.5; an explicit
/// step count violating the guard throws ConfigError.  Throws BlowUpError
/// when the state norm passes options.blowup and ToleranceError when
/// refinement hits max_steps without meeting the tolerance.
[[nodiscard]] Trajectory integrate_mild(const SemilinearProblem& problem,
                                        const Vector& x0, double horizon,
                                        double lambda = 1.0, double mu = 1.0,
                                        int steps = 0,
                                        const IntegrateOptions& options = {});

/// Translation along trajectories: the state at time t of the mild
/// solution from x.  Streaming (no trajectory storage).
[[nodiscard]] Vector translate(const SemilinearProblem& problem,
                               const Vector& x, double t, double lambda = 1.0,
                               double mu = 1.0, int steps = 0,
                               const IntegrateOptions& options = {});

namespace detail {
/// translate plus the grid/residual it settled on (step-count warm starts
/// for solvers that call translate in a loop).
struct TranslateResult {
  Vector state;
  int steps = 0;
  double residual = 0.0;
};
[[nodiscard]] TranslateResult translate_ex(const SemilinearProblem& problem,
                                           const Vector& x, double t,
                                           double lambda, double mu, int steps,
                                           const IntegrateOptions& options);
}  // namespace detail

/// Guaranteed local existence horizon rho / (4 K) for fields bounded by K
/// on a safety neighbourhood of width rho.
[[nodiscard]] double local_existence_horizon(double bound_k, double rho);

/// Sampled Lipschitz quotient of the time-t flow map over `pairs` random
/// pairs in `region` (weighted norm).  Deterministic for a fixed seed.
[[nodiscard]] double flow_lipschitz_estimate(
    const SemilinearProblem& problem, double t, const Region& region,
    int pairs, double lambda = 1.0, double mu = 1.0,
    std::uint64_t seed = 0x5EED, const IntegrateOptions& options = {});

/// Writes "t,x_1,...,x_n" rows with shortest round-trip decimals.
void trajectory_to_csv(const std::filesystem::path& path,
                       const Trajectory& trajectory);

/// Reads a trajectory written by trajectory_to_csv (grid and states only;
/// solver metadata is not stored in the CSV).
[[nodiscard]] Trajectory trajectory_from_csv(const std::filesystem::path& path);

}  // namespace flowdeg
