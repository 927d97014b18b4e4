#include "flowdeg/linops.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace flowdeg {

namespace {

// e^{M} v by restarted Arnoldi with norm-based substepping.  Truncation
// control is heuristic (successive Krylov sizes compared); the certified
// decay bound comes from the log-norm, not from this approximation.
Vector arnoldi_expm_apply(const Matrix& m, Vector v, double tol) {
  double norm_m = m.cwiseAbs().rowwise().sum().maxCoeff();
  int substeps = std::max(1, static_cast<int>(std::ceil(norm_m / 8.0)));
  double s = 1.0 / substeps;
  const Eigen::Index n = m.rows();
  const int m_max = std::min<Eigen::Index>(60, n);
  for (int step = 0; step < substeps; ++step) {
    double beta = v.norm();
    if (beta == 0.0) return v;
    Matrix basis(n, m_max + 1);
    Matrix h = Matrix::Zero(m_max + 1, m_max);
    basis.col(0) = v / beta;
    Vector approx = v, previous = v;
    int k = 0;
    bool happy = false;
    for (; k < m_max; ++k) {
      Vector w = m * basis.col(k);
      for (int j = 0; j <= k; ++j) {
        h(j, k) = basis.col(j).dot(w);
        w -= h(j, k) * basis.col(j);
      }
      // One re-orthogonalization pass keeps the basis usable.
      for (int j = 0; j <= k; ++j) {
        double c = basis.col(j).dot(w);
        h(j, k) += c;
        w -= c * basis.col(j);
      }
      h(k + 1, k) = w.norm();
      if (h(k + 1, k) < 1e-14 * norm_m) {
        happy = true;
        ++k;
        break;
      }
      basis.col(k + 1) = w / h(k + 1, k);
      if ((k + 1) % 8 == 0 || k + 1 == m_max) {
        Matrix hk = s * h.topLeftCorner(k + 1, k + 1);
        Vector e1 = Vector::Zero(k + 1);
        e1[0] = 1.0;
        approx = beta * (basis.leftCols(k + 1) * (hk.exp() * e1));
        if ((approx - previous).norm() <= tol * beta) {
          previous = approx;
          ++k;
          break;
        }
        previous = approx;
      }
    }
    if (happy) {
      Matrix hk = s * h.topLeftCorner(k, k);
      Vector e1 = Vector::Zero(k);
      e1[0] = 1.0;
      approx = beta * (basis.leftCols(k) * (hk.exp() * e1));
    }
    v = approx;
  }
  return v;
}

}  // namespace

LinearOperator::LinearOperator(Matrix a) : a_(std::move(a)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols())
    throw OperatorError("operator: matrix must be square and nonempty");
  weight_ = Matrix::Identity(a_.rows(), a_.cols());
  has_weight_ = false;
  init();
}

LinearOperator::LinearOperator(Matrix a, Matrix weight)
    : a_(std::move(a)), weight_(std::move(weight)) {
  if (a_.rows() == 0 || a_.rows() != a_.cols())
    throw OperatorError("operator: matrix must be square and nonempty");
  if (weight_.rows() != a_.rows() || weight_.cols() != a_.cols())
    throw OperatorError("operator: weight size mismatch");
  if (!weight_.isApprox(weight_.transpose(), 1e-12))
    throw OperatorError("operator: weight must be symmetric");
  has_weight_ = true;
  init();
}

void LinearOperator::init() {
  const Eigen::Index n = a_.rows();
  if (has_weight_) {
    Eigen::LLT<Matrix> llt(weight_);
    if (llt.info() != Eigen::Success)
      throw OperatorError("operator: weight must be positive definite");
    chol_u_ = llt.matrixU();
    chol_u_inv_ = chol_u_.triangularView<Eigen::Upper>().solve(
        Matrix::Identity(n, n));
  } else {
    chol_u_ = Matrix::Identity(n, n);
    chol_u_inv_ = chol_u_;
  }
  // Transform to the Euclidean coordinates of the weighted space and take
  // the smallest eigenvalue of the symmetric part: ||e^{-tA}||_W <=
  // e^{-omega t} for all t >= 0.
  Matrix transformed =
      has_weight_ ? Matrix(chol_u_ * a_ * chol_u_inv_) : a_;
  Matrix sym = 0.5 * (transformed + transformed.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eigen(sym,
                                              Eigen::EigenvaluesOnly);
  omega_ = eigen.eigenvalues().minCoeff();
}

double LinearOperator::weighted_norm(const Vector& x) const {
  if (x.size() != dim()) throw DomainError("operator: vector size mismatch");
  return has_weight_ ? (chol_u_ * x).norm() : x.norm();
}

double LinearOperator::weighted_inner(const Vector& x, const Vector& y) const {
  if (x.size() != dim() || y.size() != dim())
    throw DomainError("operator: vector size mismatch");
  return has_weight_ ? (chol_u_ * x).dot(chol_u_ * y) : x.dot(y);
}

Matrix LinearOperator::exponential(double t) const {
  if (t < 0.0) throw DomainError("operator: exponential needs t >= 0");
  if (t == 0.0) return Matrix::Identity(dim(), dim());
  return Matrix((-t * a_).exp());
}

Vector LinearOperator::semigroup_apply(double t, const Vector& x) const {
  if (t < 0.0) throw DomainError("operator: semigroup needs t >= 0");
  if (x.size() != dim()) throw DomainError("operator: vector size mismatch");
  if (t == 0.0) return x;
  if (dim() <= kDenseLimit) return exponential(t) * x;
  return arnoldi_expm_apply(Matrix(-t * a_), x, 1e-12);
}

Vector LinearOperator::resolvent_apply(double nu, const Vector& y) const {
  return Resolvent(*this, nu).apply(y);
}

Resolvent::Resolvent(const LinearOperator& op, double nu) : nu_(nu) {
  if (nu < 0.0) throw DomainError("resolvent: nu must be >= 0");
  const Eigen::Index n = op.dim();
  lu_.compute(nu * Matrix::Identity(n, n) + op.matrix());
  if (lu_.rcond() < LinearOperator::kRcondMin)
    throw SingularResolventError(
        "resolvent: nu I + A numerically singular (rcond < 1e-12)");
}

Vector Resolvent::apply(const Vector& y) const {
  if (y.size() != lu_.rows()) throw DomainError("resolvent: size mismatch");
  return lu_.solve(y);
}

Matrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw OperatorError("matrix file: cannot open " + path.string());
  long long n = 0;
  if (!(in >> n) || n <= 0)
    throw OperatorError("matrix file: first entry must be a positive dimension");
  Matrix m(n, n);
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < n; ++j)
      if (!(in >> m(i, j)))
        throw OperatorError("matrix file: expected " + std::to_string(n * n) +
                            " entries in " + path.string());
  return m;
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  if (m.rows() != m.cols())
    throw OperatorError("matrix file: only square matrices are stored");
  std::ofstream out(path);
  if (!out) throw OperatorError("matrix file: cannot write " + path.string());
  out << m.rows() << '\n';
  char buffer[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      auto r = std::to_chars(buffer, buffer + sizeof buffer, m(i, j));
      out.write(buffer, r.ptr - buffer);
      out.put(j + 1 == m.cols() ? '\n' : ' ');
    }
  }
}

}  // namespace flowdeg
