#include "sun/linalg.hpp"

#include <cmath>

#include "sun/errors.hpp"

namespace sun {

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    fail(ErrorCode::ShapeMismatch, "unvec: size does not match target shape");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix commutation_matrix(Index p, Index q) {
  if (p < 1 || q < 1)
    fail(ErrorCode::InvalidArgument, "commutation_matrix: p,q must be >= 1");
  Matrix k = Matrix::Zero(p * q, p * q);
  // vec(A)[i + j*p] -> vec(A^T)[j + i*q] for A of shape p x q.
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < q; ++j) k(j + i * q, i + j * p) = 1.0;
  return k;
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix sym_sqrt(const Matrix& m) {
  if (!is_symmetric(m, 1e-10))
    fail(ErrorCode::InvalidArgument, "sym_sqrt: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  const Vector& ev = es.eigenvalues();
  const double floor = 1e-12 * std::max(ev.maxCoeff(), 0.0);
  if (ev.minCoeff() <= floor)
    fail(ErrorCode::NotPositiveDefinite, "sym_sqrt: matrix is not positive definite");
  Matrix s = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() *
             es.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

}  // namespace sun
