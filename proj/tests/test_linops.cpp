#include <Eigen/Dense>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "flowdeg/linops.hpp"
#include "oracles.hpp"

using flowdeg::LinearOperator;
using flowdeg::Matrix;
using flowdeg::Vector;

namespace {

std::filesystem::path scratch_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "flowdeg-tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

/// Symmetric positive definite matrix with controlled spectrum.
Matrix spd_matrix(oracles::Rng& rng, int n, double min_eig, double max_eig) {
  const Matrix g = rng.matrix(n, n);
  const Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Vector eigs(n);
  for (int i = 0; i < n; ++i)
    eigs(i) = min_eig + (max_eig - min_eig) * rng.uniform();
  return q * eigs.asDiagonal() * q.transpose();
}

}  // namespace

TEST_SUITE("linops") {

TEST_CASE("construction validates shapes and weights") {
  CHECK_THROWS_AS(LinearOperator(Matrix::Ones(2, 3)), flowdeg::OperatorError);
  CHECK_THROWS_AS(LinearOperator(Matrix::Identity(2, 2), Matrix::Ones(3, 3)),
                  flowdeg::OperatorError);
  // Indefinite weight.
  Matrix w(2, 2);
  w << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(LinearOperator(Matrix::Identity(2, 2), w),
                  flowdeg::OperatorError);
  // Asymmetric weight.
  w << 1.0, 0.3, 0.0, 1.0;
  CHECK_THROWS_AS(LinearOperator(Matrix::Identity(2, 2), w),
                  flowdeg::OperatorError);
}

TEST_CASE("decay rate of a symmetric operator is its smallest eigenvalue") {
  Matrix a(2, 2);
  a << 2.0, 0.0, 0.0, 5.0;
  CHECK(LinearOperator(a).decay_rate() == doctest::Approx(2.0).epsilon(1e-14));

  // Adding a skew part must not change the decay rate.
  Matrix skew(2, 2);
  skew << 0.0, 3.0, -3.0, 0.0;
  CHECK(LinearOperator(a + skew).decay_rate() ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("semigroup contracts at the certified rate in the weighted norm") {
  oracles::Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + trial;
    const Matrix w = spd_matrix(rng, n, 0.5, 3.0);
    Matrix a = spd_matrix(rng, n, 0.3, 2.0);
    a += 0.2 * (rng.matrix(n, n) - rng.matrix(n, n));  // lose symmetry
    const LinearOperator op(a, w);
    const double omega = op.decay_rate();
    for (double t : {0.1, 0.7, 2.5}) {
      for (int k = 0; k < 20; ++k) {
        const Vector x = rng.vector(n);
        const double lhs = op.weighted_norm(op.semigroup_apply(t, x));
        const double rhs = std::exp(-omega * t) * op.weighted_norm(x);
        CHECK(lhs <= rhs * (1.0 + 1e-10));
      }
    }
  }
}

TEST_CASE("semigroup action matches the Taylor-series exponential") {
  oracles::Rng rng(7);
  for (int trial = 0; trial < 4; ++trial) {
    const Matrix a = rng.matrix(3, 3);
    const LinearOperator op(a);
    const double t = 0.3 + trial * 0.4;
    const Matrix reference = oracles::expm_taylor((-t * a).eval());
    CHECK((op.exponential(t) - reference).norm() <= 1e-12);
    const Vector x = rng.vector(3, 2.0);
    CHECK((op.semigroup_apply(t, x) - reference * x).norm() <=
          1e-12 * (1.0 + x.norm()));
  }
}

TEST_CASE("large-dimension semigroup action agrees with a spectral oracle") {
  // Q diag(d) Q^T with a Householder reflector Q: the exponential is
  // Q e^{-t d} Q^T exactly, and the dimension is past the dense cutoff.
  const int n = static_cast<int>(LinearOperator::kDenseLimit) + 10;
  oracles::Rng rng(23);
  Vector v = rng.vector(n);
  v.normalize();
  const Matrix q = Matrix::Identity(n, n) - 2.0 * v * v.transpose();
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = 0.5 + 2.0 * rng.uniform();
  const Matrix a = q * d.asDiagonal() * q.transpose();
  const LinearOperator op(a);
  const double t = 0.8;
  const Vector x = rng.vector(n);
  const Vector decayed = (-t * d.array()).exp();
  const Vector expected = q * (decayed.asDiagonal() * (q.transpose() * x));
  CHECK((op.semigroup_apply(t, x) - expected).norm() <=
        1e-10 * (1.0 + x.norm()));
}

TEST_CASE("negative time is rejected") {
  const LinearOperator op(Matrix::Identity(2, 2));
  CHECK_THROWS_AS((void)op.semigroup_apply(-0.1, Vector::Zero(2)),
                  flowdeg::DomainError);
  CHECK_THROWS_AS((void)op.exponential(-1.0), flowdeg::DomainError);
}

TEST_CASE("resolvent solves the shifted system") {
  oracles::Rng rng(3);
  const Matrix a = spd_matrix(rng, 4, 0.2, 2.0);
  const LinearOperator op(a);
  for (double nu : {0.0, 1.0, 10.0}) {
    const Vector y = rng.vector(4);
    const Vector x = op.resolvent_apply(nu, y);
    CHECK(((nu * Matrix::Identity(4, 4) + a) * x - y).norm() <=
          1e-10 * y.norm());
  }
  CHECK_THROWS_AS((void)op.resolvent_apply(-1.0, Vector::Zero(4)),
                  flowdeg::DomainError);
}

TEST_CASE("singular resolvent is reported, not silently inverted") {
  const LinearOperator op(Matrix::Zero(2, 2));
  CHECK_THROWS_AS((void)op.resolvent_apply(0.0, Vector::Ones(2)),
                  flowdeg::SingularResolventError);
  CHECK_THROWS_AS(flowdeg::Resolvent(op, 0.0),
                  flowdeg::SingularResolventError);
}

TEST_CASE("factored resolvent matches the one-shot solve") {
  oracles::Rng rng(5);
  const Matrix a = spd_matrix(rng, 3, 0.5, 2.0);
  const LinearOperator op(a);
  const flowdeg::Resolvent res(op, 0.7);
  for (int k = 0; k < 5; ++k) {
    const Vector y = rng.vector(3);
    CHECK((res.apply(y) - op.resolvent_apply(0.7, y)).norm() <= 1e-13);
  }
}

TEST_CASE("weighted norm and inner product are consistent") {
  oracles::Rng rng(9);
  const Matrix w = spd_matrix(rng, 3, 0.5, 4.0);
  const LinearOperator op(Matrix::Identity(3, 3), w);
  const Vector x = rng.vector(3);
  const Vector y = rng.vector(3);
  CHECK(op.weighted_inner(x, x) ==
        doctest::Approx(op.weighted_norm(x) * op.weighted_norm(x))
            .epsilon(1e-12));
  CHECK(op.weighted_inner(x, y) ==
        doctest::Approx(x.dot(w * y)).epsilon(1e-12));
  // The Cholesky factor realizes the isometry onto Euclidean space.
  CHECK((op.weight_chol() * x).norm() ==
        doctest::Approx(op.weighted_norm(x)).epsilon(1e-12));
}

TEST_CASE("matrix files round-trip exactly and reject junk") {
  const auto path = scratch_file("matrix-roundtrip.txt");
  oracles::Rng rng(13);
  Matrix m = rng.matrix(3, 3, std::numbers::pi);
  m(1, 2) = 0.1;  // a value with no finite binary expansion
  flowdeg::save_matrix(path, m);
  const Matrix back = flowdeg::load_matrix(path);
  REQUIRE(back.rows() == 3);
  CHECK((back.array() == m.array()).all());  // bit-exact decimals

  const auto bad = scratch_file("matrix-bad.txt");
  {
    std::ofstream out(bad);
    out << "2\n1.0 2.0 3.0\n";  // three entries, four needed
  }
  CHECK_THROWS_AS((void)flowdeg::load_matrix(bad), flowdeg::OperatorError);
  CHECK_THROWS_AS((void)flowdeg::load_matrix(scratch_file("missing.txt")),
                  flowdeg::OperatorError);
}

}  // TEST_SUITE
