#pragma once

#include <functional>
#include <string>
#include <vector>

#include "flowdeg/linops.hpp"
#include "flowdeg/region.hpp"

namespace flowdeg {

/// Continuous vector field on R^n.
using Field = std::function<Vector(const Vector&)>;

/// One located zero of a field, with its local index data.
struct ZeroRecord {
  Vector location;
  double field_norm = 0.0;  ///< ||f(z)|| after polishing
  int sign = 0;             ///< sign of det Df(z); 0 when degenerate
  double det = 0.0;         ///< det Df(z)
  double det_relative = 0.0;  ///< |det| / Hadamard row bound, in [0,1]
  double condition = 0.0;     ///< 2-norm condition number of Df(z)
};

struct DegreeResult {
  long long value = 0;
  /// min ||f|| over the boundary sample.
  double boundary_margin = 0.0;
  /// Admissibility threshold the margin was tested against.
  double margin_threshold = 0.0;
  std::vector<ZeroRecord> zeros;
  std::string method;  ///< "zero-sum" or "condensing-limit"
  /// True when the margin is safely positive, every zero is nondegenerate
  /// and well conditioned, and (dim <= 2) the boundary cross-check agrees.
  bool certified = false;
  std::vector<std::string> diagnostics;
  /// Resolvent parameter for degrees of perturbed generators (else unset).
  std::optional<double> nu;
};

struct DegreeOptions {
  /// Newton multistart seed count; 0 selects 64 * 2^dim for dim <= 10 and
  /// max(32, dim/2) above (degrees in dimension > 10 are outside the
  /// supported envelope and assume a unique-zero/contraction setting).
  std::size_t seeds = 0;
  std::size_t max_newton_iterations = 60;
  /// Boundary admissibility sample density per face; 0 selects 128 * dim
  /// for box faces and 128 for the sphere (which already scales its
  /// sample count by the dimension).
  std::size_t boundary_per_face = 0;
  double margin_rel_tolerance = 1e-6;
  double dedup_rel_radius = 1e-6;
  /// |det Df(z)| below this fraction of the Hadamard row bound counts as
  /// degenerate (result not certified).
  double degenerate_rel_det = 1e-8;
  double condition_limit = 1e12;
  /// Enforce the winding / sign-change cross-check in dimension <= 2.
  bool cross_check = true;
};

/// Brouwer degree of `field` over `region` by damped-Newton zero
/// enumeration and Jacobian sign summation.  Throws InadmissibleFieldError
/// when the boundary margin falls below the admissibility threshold, and
/// CrossCheckError when the low-dimensional boundary oracle disagrees with
/// a certified zero sum.  A degenerate zero yields an uncertified result
/// with diagnostics rather than an error or a regularized value.
[[nodiscard]] DegreeResult brouwer_degree(const Field& field,
                                          const Region& region,
                                          const DegreeOptions& options = {});

/// Degree of x - F(x) defined through the condensing limit: the common
/// value of deg(x - (1-eps) F(x)) along `schedule` (default 2^-3 .. 2^-8).
/// Returns the stabilized value; throws LimitUnstableError when the last
/// three schedule entries disagree, and InadmissibleFieldError (naming the
/// offending entry) when a relaxed field loses admissibility.
[[nodiscard]] DegreeResult degree_condensing_limit(
    const Field& map_f, const Region& region,
    const std::vector<double>& schedule = {},
    const DegreeOptions& options = {});

/// Topological degree of the perturbed generator -A + F over `region`,
/// computed as the degree of the resolvent-reduced field
///   x - (nu I + A)^{-1} (nu x + F(x)),
/// whose value is independent of nu >= 0.  The admissibility precheck
/// samples ||-A x + F(x)|| on the boundary.
[[nodiscard]] DegreeResult degree_resolvent(const LinearOperator& op,
                                            const Field& field_f,
                                            const Region& region,
                                            double nu = 1.0,
                                            const DegreeOptions& options = {});

/// Minimum boundary margin of the straight-line homotopy between two
/// fields over `steps` evenly spaced homotopy values (admissibility check
/// for homotopy-invariance arguments).
[[nodiscard]] double homotopy_boundary_margin(const Field& field_a,
                                              const Field& field_b,
                                              const Region& region,
                                              std::size_t steps = 11,
                                              std::size_t per_face = 0);

/// JSON (text) serialization of a DegreeResult, schema version 1.
[[nodiscard]] std::string degree_result_to_json(const DegreeResult& result);

}  // namespace flowdeg
