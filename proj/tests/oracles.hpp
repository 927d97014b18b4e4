#pragma once

/// Reference computations for the tests, each written directly from its
/// defining formula and sharing no code with the library: a Taylor-series
/// matrix exponential, trapezoid quadrature, winding numbers and
/// sign-change counts for low-dimensional degrees, closed-form solutions
/// of the scalar model equations, and a self-contained deterministic RNG.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracles {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// SplitMix64; deterministic across platforms, independent of the library's
/// sampling helpers.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed + 0x9E3779B97F4A7C15ULL) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }

  MatrixXd matrix(int rows, int cols, double scale = 1.0) {
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = scale * symmetric();
    return m;
  }

  VectorXd vector(int n, double scale = 1.0) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = scale * symmetric();
    return v;
  }
};

/// e^M by a 50-term Taylor series with scaling and squaring: M is scaled
/// by 2^-s until its max-norm is below 1/2, the series is summed, and the
/// result squared s times.  At norm 1/2 the 50th term is below 1e-80, so
/// truncation is far under double rounding.
inline MatrixXd expm_taylor(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("square matrix only");
  const double norm = m.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  double scale = 1.0;
  while (norm * scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const MatrixXd a = scale * m;
  MatrixXd term = MatrixXd::Identity(m.rows(), m.cols());
  MatrixXd sum = term;
  for (int k = 1; k <= 50; ++k) {
    term = (term * a) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// Composite trapezoid rule with n subintervals.
inline double trapezoid(const std::function<double(double)>& f, double a,
                        double b, int n) {
  const double h = (b - a) / n;
  double acc = 0.5 * (f(a) + f(b));
  for (int k = 1; k < n; ++k) acc += f(a + k * h);
  return acc * h;
}

/// Degree of a continuous scalar field over [a, b] with f nonzero at the
/// ends: (sign f(b) - sign f(a)) / 2.
inline long long sign_change_degree(const std::function<double(double)>& f,
                                    double a, double b) {
  const double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0 || fb == 0.0)
    throw std::invalid_argument("field vanishes at an endpoint");
  const int sa = fa > 0.0 ? 1 : -1;
  const int sb = fb > 0.0 ? 1 : -1;
  return (sb - sa) / 2;
}

/// Winding number of a planar field along a closed counterclockwise loop:
/// accumulated angle of f around the loop divided by 2 pi.  `loop` must be
/// dense enough that consecutive angle jumps stay below pi; an oversized
/// jump throws rather than silently mis-winding.
inline long long winding_degree(
    const std::function<VectorXd(const VectorXd&)>& f,
    const std::vector<VectorXd>& loop) {
  if (loop.size() < 8) throw std::invalid_argument("loop too sparse");
  double total = 0.0;
  VectorXd v = f(loop.front());
  double prev = std::atan2(v(1), v(0));
  for (std::size_t i = 1; i <= loop.size(); ++i) {
    v = f(loop[i % loop.size()]);
    if (v.norm() == 0.0) throw std::invalid_argument("zero on the loop");
    const double angle = std::atan2(v(1), v(0));
    double jump = angle - prev;
    while (jump > std::numbers::pi) jump -= 2.0 * std::numbers::pi;
    while (jump < -std::numbers::pi) jump += 2.0 * std::numbers::pi;
    if (std::abs(jump) > 0.9 * std::numbers::pi)
      throw std::invalid_argument("loop too sparse for the winding count");
    total += jump;
    prev = angle;
  }
  return std::llround(total / (2.0 * std::numbers::pi));
}

/// Counterclockwise rectangle loop for winding_degree.
inline std::vector<VectorXd> rectangle_loop(double x0, double x1, double y0,
                                            double y1, int per_side) {
  std::vector<VectorXd> loop;
  loop.reserve(4 * static_cast<std::size_t>(per_side));
  auto push = [&loop](double x, double y) {
    VectorXd p(2);
    p << x, y;
    loop.push_back(p);
  };
  for (int k = 0; k < per_side; ++k)
    push(x0 + (x1 - x0) * k / per_side, y0);
  for (int k = 0; k < per_side; ++k)
    push(x1, y0 + (y1 - y0) * k / per_side);
  for (int k = 0; k < per_side; ++k)
    push(x1 - (x1 - x0) * k / per_side, y1);
  for (int k = 0; k < per_side; ++k)
    push(x0, y1 - (y1 - y0) * k / per_side);
  return loop;
}

/// Counterclockwise circle loop for winding_degree.
inline std::vector<VectorXd> circle_loop(double cx, double cy, double radius,
                                         int count) {
  std::vector<VectorXd> loop;
  loop.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / count;
    VectorXd p(2);
    p << cx + radius * std::cos(angle), cy + radius * std::sin(angle);
    loop.push_back(p);
  }
  return loop;
}

// ---------------------------------------------------------------------------
// Closed forms for the model equations used across the tests.

/// u' = -u + 1, u(0) = 0   =>   u(t) = 1 - e^{-t}.
inline double relaxation_solution(double t) { return 1.0 - std::exp(-t); }

/// u' = -u + u^2, u(0) = u0 in (0, 1)  =>  u(t) = u0 / (u0 + (1-u0) e^t).
/// (Bernoulli substitution v = 1/u gives v' = v - 1.)
inline double logistic_decay_solution(double t, double u0) {
  return u0 / (u0 + (1.0 - u0) * std::exp(t));
}

/// The 1-periodic solution of u' = lambda (-u + 1 + cos(2 pi t)) is
/// u(t) = 1 + Re[c e^{2 pi i t}] with c = lambda / (lambda + 2 pi i), so
/// its initial value is 1 + lambda^2 / (lambda^2 + 4 pi^2).
inline double forced_periodic_initial(double lambda) {
  const double pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  return 1.0 + lambda * lambda / (lambda * lambda + pi2);
}

/// |-x + 1| evaluated at forced_periodic_initial(lambda): the residual of
/// the time-averaged field at the periodic point.
inline double forced_periodic_residual(double lambda) {
  return forced_periodic_initial(lambda) - 1.0;
}

/// The 2 pi-periodic solution of u' = -u + sin t is (sin t - cos t) / 2.
inline double sine_forced_periodic(double t) {
  return 0.5 * (std::sin(t) - std::cos(t));
}

/// Smallest eigenvalue of the 3-point Laplacian with zero end values on n
/// interior points of a width-l interval: 4 (n+1)^2 / l^2 *
/// sin^2(pi / (2(n+1))).
inline double heat_strip_min_eigenvalue(int n, double l) {
  const double m = n + 1.0;
  const double s = std::sin(std::numbers::pi / (2.0 * m));
  return 4.0 * m * m / (l * l) * s * s;
}

}  // namespace oracles
