#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>

#include "flowdeg/errors.hpp"

namespace flowdeg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A linear operator A on R^n together with the inner product the state
/// space carries, representing the generator of the contraction semigroup
/// e^{-tA}.  The weight matrix W defines <x,y> = x^T W y; it defaults to
/// the identity.  Values are immutable after construction.
class LinearOperator {
 public:
  /// Euclidean state space.  Throws OperatorError if `a` is not square.
  explicit LinearOperator(Matrix a);

  /// Weighted state space.  Throws OperatorError if `weight` is not
  /// symmetric positive definite or the sizes disagree.
  LinearOperator(Matrix a, Matrix weight);

  [[nodiscard]] Eigen::Index dim() const noexcept { return a_.rows(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return a_; }
  [[nodiscard]] const Matrix& weight() const noexcept { return weight_; }
  [[nodiscard]] bool has_weight() const noexcept { return has_weight_; }

  /// Certified decay rate omega with ||e^{-tA}x|| <= e^{-omega t}||x|| in
  /// the weighted norm: the smallest eigenvalue of the weight-symmetrized
  /// part of A.  May be <= 0, in which case the semigroup is not a
  /// contraction and downstream hypotheses fail.
  [[nodiscard]] double decay_rate() const noexcept { return omega_; }

  [[nodiscard]] double weighted_norm(const Vector& x) const;
  [[nodiscard]] double weighted_inner(const Vector& x, const Vector& y) const;

  /// e^{-tA} x for t >= 0.  Dense Pade exponential for moderate dimension,
  /// Arnoldi action above kDenseLimit rows.  Throws DomainError for t < 0.
  [[nodiscard]] Vector semigroup_apply(double t, const Vector& x) const;

  /// Dense e^{-tA}.  Throws DomainError for t < 0.
  [[nodiscard]] Matrix exponential(double t) const;

  /// (nu I + A)^{-1} y for nu >= 0.  Throws DomainError for nu < 0 and
  /// SingularResolventError when the system is numerically singular.
  [[nodiscard]] Vector resolvent_apply(double nu, const Vector& y) const;

  /// Cholesky factor U (upper) of the weight, W = U^T U; the map x -> U x
  /// is an isometry from the weighted space onto Euclidean R^n.
  [[nodiscard]] const Matrix& weight_chol() const noexcept { return chol_u_; }

  static constexpr Eigen::Index kDenseLimit = 200;
  static constexpr double kRcondMin = 1e-12;

 private:
  void init();

  Matrix a_;
  Matrix weight_;
  Matrix chol_u_;      // W = chol_u_^T chol_u_
  Matrix chol_u_inv_;  // chol_u_^{-1}
  bool has_weight_ = false;
  double omega_ = 0.0;
};

/// Factored resolvent (nu I + A)^{-1} for repeated application.
/// Validates conditioning once at construction.
class Resolvent {
 public:
  Resolvent(const LinearOperator& op, double nu);

  [[nodiscard]] Vector apply(const Vector& y) const;
  [[nodiscard]] double nu() const noexcept { return nu_; }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  double nu_;
};

/// Reads a square matrix from a plain-text file: first line the dimension
/// n, then n*n entries row-major, whitespace separated.
[[nodiscard]] Matrix load_matrix(const std::filesystem::path& path);

/// Writes `m` in the load_matrix format with shortest round-trip decimals.
void save_matrix(const std::filesystem::path& path, const Matrix& m);

}  // namespace flowdeg
