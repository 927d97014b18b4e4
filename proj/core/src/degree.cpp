#include "flowdeg/degree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "json_util.hpp"

namespace flowdeg {

namespace {

constexpr double kZeroAcceptNorm = 1e-9;

std::size_t auto_seed_count(int dim) {
  if (dim <= 10) return std::size_t{64} << dim;
  return std::max<std::size_t>(32, static_cast<std::size_t>(dim) / 2);
}

std::size_t auto_boundary_density(const Region& region,
                                  const DegreeOptions& options) {
  if (options.boundary_per_face != 0) return options.boundary_per_face;
  // The sphere already scales its sample count by the dimension, so its
  // per-face density stays flat; box faces get the dimension factor here.
  if (region.kind() == Region::Kind::ball) return 128;
  return 128 * static_cast<std::size_t>(region.dim());
}

struct BoundaryCheck {
  double margin = 0.0;
  double scale = 0.0;
  double threshold = 0.0;
};

BoundaryCheck boundary_margin(const Field& field, const Region& region,
                              std::size_t per_face, double rel_tolerance) {
  BoundaryCheck check;
  check.margin = std::numeric_limits<double>::infinity();
  for (const Vector& x : region.boundary_points(per_face)) {
    double norm = field(x).norm();
    check.margin = std::min(check.margin, norm);
    check.scale = std::max(check.scale, norm);
  }
  check.threshold = rel_tolerance * (1.0 + check.scale);
  return check;
}

/// Central-difference Jacobian with step cbrt(eps) * (1 + ||x||).
Matrix fd_jacobian(const Field& field, const Vector& x) {
  static const double base =
      std::cbrt(std::numeric_limits<double>::epsilon());
  const double h = base * (1.0 + x.norm());
  const Eigen::Index n = x.size();
  Matrix jacobian(n, n);
  Vector probe = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    probe[j] = x[j] + h;
    Vector forward = field(probe);
    probe[j] = x[j] - h;
    Vector backward = field(probe);
    probe[j] = x[j];
    jacobian.col(j) = (forward - backward) / (2.0 * h);
  }
  return jacobian;
}

/// Damped Newton iteration; empty when it fails to reach the target.
std::optional<Vector> damped_newton(const Field& field, Vector x,
                                    double accept_norm, double target_norm,
                                    std::size_t max_iterations) {
  Vector fx = field(x);
  double norm = fx.norm();
  for (std::size_t it = 0; it < max_iterations; ++it) {
    if (norm <= target_norm) return x;
    Matrix jacobian = fd_jacobian(field, x);
    Eigen::PartialPivLU<Matrix> lu(jacobian);
    if (lu.rcond() < 1e-15) break;
    Vector delta = lu.solve(fx);
    if (!delta.allFinite()) break;
    double step = 1.0;
    bool advanced = false;
    while (step >= 1e-4) {
      Vector trial = x - step * delta;
      Vector ft = field(trial);
      double trial_norm = ft.norm();
      if (trial_norm < (1.0 - 0.25 * step) * norm || trial_norm <= target_norm) {
        x = std::move(trial);
        fx = std::move(ft);
        norm = trial_norm;
        advanced = true;
        break;
      }
      step *= 0.5;
    }
    if (!advanced) break;
  }
  if (norm <= accept_norm) return x;
  return std::nullopt;
}

struct ZeroAnalysis {
  ZeroRecord record;
  bool degenerate = false;
  bool ill_conditioned = false;
};

ZeroAnalysis analyze_zero(const Field& field, const Vector& z,
                          const DegreeOptions& options) {
  ZeroAnalysis analysis;
  analysis.record.location = z;
  analysis.record.field_norm = field(z).norm();
  Matrix jacobian = fd_jacobian(field, z);
  double hadamard = 1.0;
  for (Eigen::Index i = 0; i < jacobian.rows(); ++i)
    hadamard *= jacobian.row(i).norm();
  Eigen::PartialPivLU<Matrix> lu(jacobian);
  double det = lu.determinant();
  analysis.record.det = det;
  analysis.record.det_relative =
      hadamard > 0.0 ? std::abs(det) / hadamard : 0.0;
  Eigen::JacobiSVD<Matrix> svd(jacobian);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  analysis.record.condition =
      smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (analysis.record.det_relative <= options.degenerate_rel_det) {
    analysis.degenerate = true;
    analysis.record.sign = 0;
  } else {
    analysis.record.sign = det > 0.0 ? 1 : -1;
  }
  if (analysis.record.condition > options.condition_limit)
    analysis.ill_conditioned = true;
  return analysis;
}

/// Sign-change count (1-D boundary oracle).
long long degree_1d(const Field& field, const Region& region) {
  Vector a(1), b(1);
  if (region.kind() == Region::Kind::box) {
    a = region.lower();
    b = region.upper();
  } else {
    a = region.center().array() - region.radius();
    b = region.center().array() + region.radius();
  }
  auto sgn = [](double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); };
  return (sgn(field(b)[0]) - sgn(field(a)[0])) / 2;
}

/// Winding number of the field along the CCW boundary (2-D oracle).
/// Empty when the angular increments do not stabilize.
std::optional<long long> winding_2d(const Field& field, const Region& region) {
  for (std::size_t count = 512; count <= (1u << 15); count *= 2) {
    std::vector<Vector> loop = region.boundary_loop(count);
    std::vector<Vector> values(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) values[i] = field(loop[i]);
    double total = 0.0;
    bool fine = true;
    for (std::size_t i = 0; i < loop.size(); ++i) {
      const Vector& u = values[i];
      const Vector& v = values[(i + 1) % loop.size()];
      double cross = u[0] * v[1] - u[1] * v[0];
      double dot = u.dot(v);
      double dtheta = std::atan2(cross, dot);
      if (std::abs(dtheta) > 0.5 * std::numbers::pi) {
        fine = false;
        break;
      }
      total += dtheta;
    }
    if (!fine) continue;
    double turns = total / (2.0 * std::numbers::pi);
    long long rounded = std::llround(turns);
    if (std::abs(turns - static_cast<double>(rounded)) < 0.25) return rounded;
  }
  return std::nullopt;
}

Vector region_midpoint(const Region& region) {
  return region.kind() == Region::Kind::box
             ? Vector(0.5 * (region.lower() + region.upper()))
             : region.center();
}

DegreeResult degree_once(const Field& field, const Region& region,
                         const DegreeOptions& options, std::size_t seeds) {
  DegreeResult result;
  result.method = "zero-sum";

  // Boundary admissibility, density doubled once near the threshold.
  std::size_t per_face = auto_boundary_density(region, options);
  BoundaryCheck check =
      boundary_margin(field, region, per_face, options.margin_rel_tolerance);
  if (check.margin < 10.0 * check.threshold)
    check = boundary_margin(field, region, 2 * per_face,
                            options.margin_rel_tolerance);
  result.boundary_margin = check.margin;
  result.margin_threshold = check.threshold;
  if (check.margin <= check.threshold) {
    std::ostringstream oss;
    oss << "degree: field inadmissible, boundary margin " << check.margin
        << " <= threshold " << check.threshold;
    throw InadmissibleFieldError(oss.str());
  }

  // Multistart zero enumeration.
  const double target_norm = 1e-13 * (1.0 + check.scale);
  const double dedup_radius = options.dedup_rel_radius * region.diameter();
  std::vector<Vector> found;
  for (std::size_t i = 0; i < seeds; ++i) {
    Vector seed = i == 0 ? region_midpoint(region)
                         : region.interior_point(i - 1);
    auto zero = damped_newton(field, std::move(seed), kZeroAcceptNorm,
                              target_norm, options.max_newton_iterations);
    if (!zero || !region.contains(*zero)) continue;
    bool duplicate = false;
    for (const Vector& known : found)
      if ((known - *zero).norm() < dedup_radius) {
        duplicate = true;
        break;
      }
    if (!duplicate) found.push_back(std::move(*zero));
  }

  bool any_degenerate = false;
  bool any_ill_conditioned = false;
  for (const Vector& z : found) {
    ZeroAnalysis analysis = analyze_zero(field, z, options);
    any_degenerate |= analysis.degenerate;
    any_ill_conditioned |= analysis.ill_conditioned;
    if (analysis.degenerate)
      result.diagnostics.push_back(
          "degenerate zero #" + std::to_string(result.zeros.size()) +
          ": relative |det| " + std::to_string(analysis.record.det_relative));
    if (analysis.ill_conditioned)
      result.diagnostics.push_back(
          "ill-conditioned Jacobian: condition " +
          std::to_string(analysis.record.condition));
    result.value += analysis.record.sign;
    result.zeros.push_back(std::move(analysis.record));
  }

  result.certified = !any_degenerate && !any_ill_conditioned;

  // Boundary oracle cross-check in low dimension (skipped for results that
  // already lost their certificate: a degenerate zero sum is not a claim).
  if (options.cross_check && result.certified && region.dim() <= 2) {
    if (region.dim() == 1) {
      long long oracle = degree_1d(field, region);
      if (oracle != result.value) {
        result.certified = false;
        result.diagnostics.push_back(
            "cross-check: sign-change count " + std::to_string(oracle) +
            " != zero sum " + std::to_string(result.value));
      }
    } else {
      std::optional<long long> oracle = winding_2d(field, region);
      if (!oracle) {
        result.certified = false;
        result.diagnostics.push_back("cross-check: winding did not stabilize");
      } else if (*oracle != result.value) {
        result.certified = false;
        result.diagnostics.push_back(
            "cross-check: winding " + std::to_string(*oracle) +
            " != zero sum " + std::to_string(result.value));
      }
    }
  }
  return result;
}

}  // namespace

DegreeResult brouwer_degree(const Field& field, const Region& region,
                            const DegreeOptions& options) {
  if (region.dim() <= 0) throw DomainError("degree: empty region");
  std::size_t seeds =
      options.seeds != 0 ? options.seeds : auto_seed_count(region.dim());
  DegreeResult result = degree_once(field, region, options, seeds);
  // A failed cross-check usually means a missed zero: escalate the
  // multistart once before giving up.
  bool cross_failed =
      !result.certified &&
      std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                  [](const std::string& d) {
                    return d.starts_with("cross-check:") &&
                           d.find("!=") != std::string::npos;
                  });
  if (cross_failed) {
    DegreeResult retry = degree_once(field, region, options, 2 * seeds);
    if (!retry.certified &&
        std::any_of(retry.diagnostics.begin(), retry.diagnostics.end(),
                    [](const std::string& d) {
                      return d.starts_with("cross-check:");
                    }))
      throw CrossCheckError(
          "degree: zero sum and boundary oracle disagree after escalation: " +
          retry.diagnostics.back());
    return retry;
  }
  return result;
}

DegreeResult degree_condensing_limit(const Field& map_f, const Region& region,
                                     const std::vector<double>& schedule,
                                     const DegreeOptions& options) {
  std::vector<double> eps = schedule;
  if (eps.empty())
    for (int j = 3; j <= 8; ++j) eps.push_back(std::ldexp(1.0, -j));

  std::vector<long long> values;
  DegreeResult last;
  bool all_certified = true;
  for (double e : eps) {
    Field relaxed = [&map_f, e](const Vector& x) {
      return Vector(x - (1.0 - e) * map_f(x));
    };
    try {
      last = brouwer_degree(relaxed, region, options);
    } catch (const InadmissibleFieldError& err) {
      throw InadmissibleFieldError(
          "condensing limit: relaxation " + std::to_string(e) +
          " inadmissible: " + err.what());
    }
    all_certified &= last.certified;
    values.push_back(last.value);
  }
  if (values.size() >= 3) {
    auto tail = values.end();
    if (*(tail - 1) != *(tail - 2) || *(tail - 2) != *(tail - 3)) {
      std::ostringstream oss;
      oss << "condensing limit: schedule did not stabilize (last three ";
      oss << *(tail - 3) << ", " << *(tail - 2) << ", " << *(tail - 1) << ")";
      throw LimitUnstableError(oss.str());
    }
  }
  DegreeResult result = std::move(last);
  result.method = "condensing-limit";
  result.certified = all_certified;
  for (std::size_t i = 0; i < eps.size(); ++i)
    result.diagnostics.push_back("relaxation " + std::to_string(eps[i]) +
                                 ": degree " + std::to_string(values[i]));
  return result;
}

DegreeResult degree_resolvent(const LinearOperator& op, const Field& field_f,
                              const Region& region, double nu,
                              const DegreeOptions& options) {
  if (op.dim() != region.dim())
    throw DomainError("degree: operator/region dimension mismatch");
  // Admissibility of the unreduced field -A x + F(x) on the boundary.
  Field static_field = [&](const Vector& x) {
    return Vector(-(op.matrix() * x) + field_f(x));
  };
  BoundaryCheck check =
      boundary_margin(static_field, region,
                      auto_boundary_density(region, options),
                      options.margin_rel_tolerance);
  if (check.margin <= check.threshold) {
    std::ostringstream oss;
    oss << "degree: -A + F inadmissible on the boundary, margin "
        << check.margin << " <= threshold " << check.threshold;
    throw InadmissibleFieldError(oss.str());
  }

  Resolvent resolvent(op, nu);
  Field reduced = [&](const Vector& x) {
    return Vector(x - resolvent.apply(nu * x + field_f(x)));
  };
  DegreeResult result = brouwer_degree(reduced, region, options);
  result.nu = nu;
  std::ostringstream oss;
  oss << "static boundary margin " << check.margin << " (threshold "
      << check.threshold << ")";
  result.diagnostics.push_back(oss.str());
  return result;
}

double homotopy_boundary_margin(const Field& field_a, const Field& field_b,
                                const Region& region, std::size_t steps,
                                std::size_t per_face) {
  if (steps < 2) throw DomainError("homotopy margin: need at least 2 steps");
  if (per_face == 0) {
    per_face = region.kind() == Region::Kind::ball
                   ? 128
                   : 128 * static_cast<std::size_t>(region.dim());
  }
  double margin = std::numeric_limits<double>::infinity();
  std::vector<Vector> points = region.boundary_points(per_face);
  for (const Vector& x : points) {
    Vector a = field_a(x);
    Vector b = field_b(x);
    for (std::size_t k = 0; k < steps; ++k) {
      double s = static_cast<double>(k) / static_cast<double>(steps - 1);
      margin = std::min(margin, ((1.0 - s) * a + s * b).norm());
    }
  }
  return margin;
}

std::string degree_result_to_json(const DegreeResult& result) {
  detail::ordered_json j;
  j["schema"] = 1;
  j["value"] = result.value;
  j["boundary_margin"] = result.boundary_margin;
  j["margin_threshold"] = result.margin_threshold;
  j["method"] = result.method;
  j["certified"] = result.certified;
  if (result.nu) j["nu"] = *result.nu;
  detail::ordered_json zeros = detail::ordered_json::array();
  for (const ZeroRecord& z : result.zeros) {
    detail::ordered_json record;
    record["location"] = detail::to_json_array(z.location);
    record["field_norm"] = z.field_norm;
    record["sign"] = z.sign;
    record["det"] = z.det;
    record["det_relative"] = z.det_relative;
    record["condition"] = z.condition;
    zeros.push_back(std::move(record));
  }
  j["zeros"] = std::move(zeros);
  j["diagnostics"] = result.diagnostics;
  return j.dump(2);
}

}  // namespace flowdeg
