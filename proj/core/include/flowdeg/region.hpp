#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "flowdeg/errors.hpp"

namespace flowdeg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bounded open region of R^n over which degrees are computed: an
/// axis-aligned box or a ball.  A ball may carry an SPD metric M, in which
/// case it is the set ||x - c||_M < r (an ellipsoid in Euclidean
/// coordinates); this is how fixed-radius balls of a weighted state space
/// are expressed.
class Region {
 public:
  enum class Kind { box, ball };

  static Region box(Vector lower, Vector upper);
  static Region ball(Vector center, double radius);
  static Region ball(Vector center, double radius, const Matrix& metric);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(dim_); }

  [[nodiscard]] const Vector& lower() const;
  [[nodiscard]] const Vector& upper() const;
  [[nodiscard]] const Vector& center() const;
  [[nodiscard]] double radius() const;
  [[nodiscard]] bool has_metric() const noexcept { return has_metric_; }
  [[nodiscard]] const Matrix& metric() const;

  /// Strict interior membership with a relative tolerance pulled inward.
  [[nodiscard]] bool contains(const Vector& x, double tol = 0.0) const;

  /// Euclidean diameter (for the ellipsoid: along its longest axis).
  [[nodiscard]] double diameter() const noexcept { return diameter_; }

  /// i-th point of a deterministic low-discrepancy sequence filling the
  /// interior (Halton; balls via the radial map, no rejection).
  [[nodiscard]] Vector interior_point(std::size_t i) const;

  /// Deterministic low-discrepancy boundary sample of roughly
  /// `per_face` points per face (boxes: 2*dim faces; balls: the sphere
  /// counts as one face scaled by dim).
  [[nodiscard]] std::vector<Vector> boundary_points(std::size_t per_face) const;

  /// Ordered counterclockwise boundary loop, dim == 2 only (winding
  /// cross-checks).  Throws DomainError otherwise.
  [[nodiscard]] std::vector<Vector> boundary_loop(std::size_t count) const;

  /// Axis-aligned bounding box.
  [[nodiscard]] Region bounding_box() const;

  /// Bounding box inflated by `margin` on every side (safety boxes for
  /// local existence horizons).
  [[nodiscard]] Region inflated(double margin) const;

 private:
  Region() = default;

  Kind kind_ = Kind::box;
  Eigen::Index dim_ = 0;
  Vector lower_, upper_;    // box
  Vector center_;           // ball
  double radius_ = 0.0;     // ball
  bool has_metric_ = false;
  Matrix metric_;           // ball metric M (SPD)
  Matrix metric_chol_u_;    // M = U^T U
  Matrix metric_chol_inv_;  // U^{-1}
  double diameter_ = 0.0;
};

namespace detail {

/// Halton low-discrepancy sequence, index i >= 0, dimension d >= 1.
/// Components lie in (0,1).
[[nodiscard]] Vector halton_point(std::size_t i, int d);

/// Deterministic uniform double in [0,1) from a seeded generator state;
/// identical across platforms (bit manipulation only).
[[nodiscard]] double uniform01(std::uint64_t& state);

/// SplitMix64 seeding helper.
[[nodiscard]] std::uint64_t seed_state(std::uint64_t seed);

}  // namespace detail

}  // namespace flowdeg
