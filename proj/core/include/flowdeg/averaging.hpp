#pragma once

#include "flowdeg/evolve.hpp"

namespace flowdeg {

/// Time average (1/T) integral of F(t, x, mu) dt over one period,
/// evaluated by composite Gauss-Legendre quadrature (8-point panels).
class AveragedField {
 public:
  AveragedField(const SemilinearProblem& problem, int nodes);

  /// F_hat(x) at mu = 1.
  [[nodiscard]] Vector operator()(const Vector& x) const;
  [[nodiscard]] Vector evaluate(const Vector& x, double mu) const;

  [[nodiscard]] int nodes() const noexcept {
    return static_cast<int>(times_.size());
  }
  /// Node-doubling error estimate at the probe state (the origin).
  [[nodiscard]] double error_estimate() const noexcept {
    return error_estimate_;
  }

 private:
  Nonlinearity f_;
  std::vector<double> times_;
  std::vector<double> weights_;  // already divided by T
  double error_estimate_ = 0.0;
};

/// Builds the averaged field with `nodes` quadrature nodes (rounded up to
/// a multiple of 8; 0 selects the 64-node default).
[[nodiscard]] AveragedField average_field(const SemilinearProblem& problem,
                                          int nodes = 0);

/// The autonomous problem u' = -lambda A u + lambda F_hat(u) with the same
/// operator and period; Lipschitz/growth/bound constants are inherited
/// (averaging cannot increase them).
[[nodiscard]] SemilinearProblem averaged_problem(
    const SemilinearProblem& problem, int nodes = 0);

}  // namespace flowdeg
