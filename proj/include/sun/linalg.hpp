#pragma once

#include <Eigen/Dense>

namespace sun {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Column-major stacking of a matrix into a vector; every third/fourth
/// moment layout in this library inherits this convention.
Vector vec(const Matrix& m);

/// Inverse of vec for the given shape.
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Kronecker product, block (i,j) = a(i,j) * b.
Matrix kron(const Matrix& a, const Matrix& b);

/// The pq x pq permutation matrix K with K * vec(A) = vec(A^T) for every
/// p x q matrix A.
Matrix commutation_matrix(Index p, Index q);

/// Unique symmetric positive-definite square root, via eigendecomposition.
/// Throws NotPositiveDefinite if an eigenvalue is <= 1e-12 * max eigenvalue,
/// InvalidArgument if the input is not symmetric within 1e-10 relative.
Matrix sym_sqrt(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& m);

}  // namespace sun
