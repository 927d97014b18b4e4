#include "flowdeg/region.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <cmath>
#include <mutex>
#include <numbers>

namespace flowdeg {
namespace detail {

namespace {

// First `count` primes (Halton bases), grown on demand.
const std::vector<int>& primes_up_to_index(int count) {
  static std::vector<int> primes{2, 3};
  static std::mutex mutex;
  std::scoped_lock lock(mutex);
  while (static_cast<int>(primes.size()) < count) {
    int candidate = primes.back() + 2;
    for (;; candidate += 2) {
      bool is_prime = true;
      for (int p : primes) {
        if (p * p > candidate) break;
        if (candidate % p == 0) {
          is_prime = false;
          break;
        }
      }
      if (is_prime) break;
    }
    primes.push_back(candidate);
  }
  return primes;
}

double radical_inverse(std::size_t i, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  for (std::size_t n = i + 1; n > 0; n /= base) {
    result += static_cast<double>(n % base) * factor;
    factor *= inv_base;
  }
  return result;
}

}  // namespace

Vector halton_point(std::size_t i, int d) {
  const auto& primes = primes_up_to_index(d);
  Vector p(d);
  for (int k = 0; k < d; ++k) p[k] = radical_inverse(i, primes[k]);
  return p;
}

std::uint64_t seed_state(std::uint64_t seed) {
  // SplitMix64 scramble so nearby seeds give unrelated streams.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

namespace {

// Standard normals from consecutive (0,1) components (Box-Muller).
Vector gaussians_from_unit(const Vector& u, int d) {
  Vector g(d);
  for (int k = 0; k < d; k += 2) {
    double r = std::sqrt(-2.0 * std::log(u[k]));
    double phi = 2.0 * std::numbers::pi * u[k + 1];
    g[k] = r * std::cos(phi);
    if (k + 1 < d) g[k + 1] = r * std::sin(phi);
  }
  return g;
}

}  // namespace

}  // namespace detail

Region Region::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw DomainError("region box: empty or mismatched bounds");
  if (((upper - lower).array() <= 0.0).any())
    throw DomainError("region box: bounds must satisfy lower < upper");
  Region r;
  r.kind_ = Kind::box;
  r.dim_ = lower.size();
  r.lower_ = std::move(lower);
  r.upper_ = std::move(upper);
  r.diameter_ = (r.upper_ - r.lower_).norm();
  return r;
}

Region Region::ball(Vector center, double radius) {
  if (center.size() == 0) throw DomainError("region ball: empty center");
  if (!(radius > 0.0)) throw DomainError("region ball: radius must be > 0");
  Region r;
  r.kind_ = Kind::ball;
  r.dim_ = center.size();
  r.center_ = std::move(center);
  r.radius_ = radius;
  r.diameter_ = 2.0 * radius;
  return r;
}

Region Region::ball(Vector center, double radius, const Matrix& metric) {
  Region r = ball(std::move(center), radius);
  if (metric.rows() != r.dim_ || metric.cols() != r.dim_)
    throw DomainError("region ball: metric size mismatch");
  if (!metric.isApprox(metric.transpose(), 1e-12))
    throw DomainError("region ball: metric must be symmetric");
  Eigen::LLT<Matrix> llt(metric);
  if (llt.info() != Eigen::Success)
    throw DomainError("region ball: metric must be positive definite");
  r.has_metric_ = true;
  r.metric_ = metric;
  r.metric_chol_u_ = llt.matrixU();
  r.metric_chol_inv_ = r.metric_chol_u_
                           .triangularView<Eigen::Upper>()
                           .solve(Matrix::Identity(r.dim_, r.dim_));
  Eigen::JacobiSVD<Matrix> svd(r.metric_chol_inv_);
  r.diameter_ = 2.0 * radius * svd.singularValues()(0);
  return r;
}

const Vector& Region::lower() const {
  if (kind_ != Kind::box) throw DomainError("region: lower() on a ball");
  return lower_;
}

const Vector& Region::upper() const {
  if (kind_ != Kind::box) throw DomainError("region: upper() on a ball");
  return upper_;
}

const Vector& Region::center() const {
  if (kind_ != Kind::ball) throw DomainError("region: center() on a box");
  return center_;
}

double Region::radius() const {
  if (kind_ != Kind::ball) throw DomainError("region: radius() on a box");
  return radius_;
}

const Matrix& Region::metric() const {
  if (!has_metric_) throw DomainError("region: no metric attached");
  return metric_;
}

bool Region::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  if (kind_ == Kind::box) {
    return (x.array() > lower_.array() + tol).all() &&
           (x.array() < upper_.array() - tol).all();
  }
  Vector d = x - center_;
  double rho = has_metric_ ? (metric_chol_u_ * d).norm() : d.norm();
  return rho < radius_ - tol;
}

Vector Region::interior_point(std::size_t i) const {
  if (kind_ == Kind::box) {
    Vector h = detail::halton_point(i, dim());
    return lower_ + h.cwiseProduct(upper_ - lower_);
  }
  // Radial map: low-discrepancy direction plus a volume-uniform radius;
  // no rejection, so it works in any dimension.
  int gauss_dim = static_cast<int>(dim_ + (dim_ % 2));
  Vector h = detail::halton_point(i, gauss_dim + 1);
  Vector g = detail::gaussians_from_unit(h, gauss_dim).head(dim_);
  double gn = g.norm();
  if (gn == 0.0) g.setOnes(), gn = g.norm();
  double rho = radius_ * std::pow(h[gauss_dim], 1.0 / static_cast<double>(dim_));
  Vector dir = g / gn;
  if (has_metric_) dir = metric_chol_inv_ * dir;
  return center_ + rho * dir;
}

std::vector<Vector> Region::boundary_points(std::size_t per_face) const {
  std::vector<Vector> points;
  const int d = dim();
  if (kind_ == Kind::box) {
    if (d == 1) {
      points.push_back(lower_);
      points.push_back(upper_);
      return points;
    }
    points.reserve(2 * d * per_face);
    for (int face = 0; face < 2 * d; ++face) {
      int axis = face / 2;
      bool high = (face % 2) != 0;
      for (std::size_t i = 0; i < per_face; ++i) {
        Vector h = detail::halton_point(face * per_face + i, d - 1);
        Vector x(d);
        int k = 0;
        for (int j = 0; j < d; ++j) {
          if (j == axis) {
            x[j] = high ? upper_[j] : lower_[j];
          } else {
            x[j] = lower_[j] + h[k] * (upper_[j] - lower_[j]);
            ++k;
          }
        }
        points.push_back(std::move(x));
      }
    }
    return points;
  }
  if (d == 1) {
    points.push_back(center_.array() - radius_);
    points.push_back(center_.array() + radius_);
    return points;
  }
  std::size_t count = per_face * static_cast<std::size_t>(d);
  points.reserve(count);
  int gauss_dim = static_cast<int>(dim_ + (dim_ % 2));
  for (std::size_t i = 0; i < count; ++i) {
    Vector h = detail::halton_point(i, gauss_dim);
    Vector g = detail::gaussians_from_unit(h, gauss_dim).head(dim_);
    double gn = g.norm();
    if (gn == 0.0) g.setOnes(), gn = g.norm();
    Vector dir = g / gn;
    if (has_metric_) dir = metric_chol_inv_ * dir;
    points.push_back(center_ + radius_ * dir);
  }
  return points;
}

std::vector<Vector> Region::boundary_loop(std::size_t count) const {
  if (dim_ != 2) throw DomainError("region: boundary loop needs dim == 2");
  if (count < 8) count = 8;
  std::vector<Vector> loop;
  loop.reserve(count);
  if (kind_ == Kind::ball) {
    for (std::size_t k = 0; k < count; ++k) {
      double theta = 2.0 * std::numbers::pi * static_cast<double>(k) /
                     static_cast<double>(count);
      Vector dir(2);
      dir << std::cos(theta), std::sin(theta);
      if (has_metric_) dir = metric_chol_inv_ * dir;
      loop.push_back(center_ + radius_ * dir);
    }
    return loop;
  }
  // Counterclockwise perimeter walk, count points total.
  std::size_t per_edge = count / 4;
  if (per_edge == 0) per_edge = 1;
  auto lerp = [](double a, double b, double s) { return a + s * (b - a); };
  for (int edge = 0; edge < 4; ++edge) {
    for (std::size_t k = 0; k < per_edge; ++k) {
      double s = static_cast<double>(k) / static_cast<double>(per_edge);
      Vector x(2);
      switch (edge) {
        case 0: x << lerp(lower_[0], upper_[0], s), lower_[1]; break;
        case 1: x << upper_[0], lerp(lower_[1], upper_[1], s); break;
        case 2: x << lerp(upper_[0], lower_[0], s), upper_[1]; break;
        default: x << lower_[0], lerp(upper_[1], lower_[1], s); break;
      }
      loop.push_back(std::move(x));
    }
  }
  return loop;
}

Region Region::bounding_box() const {
  if (kind_ == Kind::box) return *this;
  Vector half(dim_);
  if (has_metric_) {
    for (Eigen::Index i = 0; i < dim_; ++i)
      half[i] = radius_ * metric_chol_inv_.row(i).norm();
  } else {
    half.setConstant(radius_);
  }
  return box(center_ - half, center_ + half);
}

Region Region::inflated(double margin) const {
  if (!(margin > 0.0)) throw DomainError("region: inflation margin must be > 0");
  Region bb = bounding_box();
  return box(bb.lower_.array() - margin, bb.upper_.array() + margin);
}

}  // namespace flowdeg
