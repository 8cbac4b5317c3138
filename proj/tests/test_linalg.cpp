#include "sun/linalg.hpp"

#include <random>

#include "doctest.h"
#include "sun/errors.hpp"

using namespace sun;

namespace {

Matrix random_matrix(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = nd(gen);
  return m;
}

Matrix random_spd(int n, std::mt19937_64& gen) {
  Matrix a = random_matrix(n, n, gen);
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

}  // namespace

TEST_CASE("vec stacks columns") {
  Matrix m(2, 2);
  m << 1, 3, 2, 4;  // rows [1,3] and [2,4]
  const Vector v = vec(m);
  REQUIRE(v.size() == 4);
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 2.0);
  CHECK(v(2) == 3.0);
  CHECK(v(3) == 4.0);

  CHECK(vec(Matrix::Zero(2, 2)).isZero(0.0));
}

TEST_CASE("unvec inverts vec") {
  std::mt19937_64 gen(11);
  const Matrix m = random_matrix(3, 5, gen);
  CHECK((unvec(vec(m), 3, 5) - m).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS((void)unvec(vec(m), 4, 4), Error);
}

TEST_CASE("commutation matrix maps vec(A) to vec(A^T)") {
  std::mt19937_64 gen(12);
  const Matrix a = random_matrix(3, 2, gen);
  const Matrix k = commutation_matrix(3, 2);
  CHECK((k * vec(a) - vec(Matrix(a.transpose()))).cwiseAbs().maxCoeff() == 0.0);

  CHECK(commutation_matrix(1, 1)(0, 0) == 1.0);

  // (2,2) swaps the middle components of a 4-vector
  const Matrix k22 = commutation_matrix(2, 2);
  Vector v(4);
  v << 10, 20, 30, 40;
  const Vector w = k22 * v;
  CHECK(w(0) == 10.0);
  CHECK(w(1) == 30.0);
  CHECK(w(2) == 20.0);
  CHECK(w(3) == 40.0);
}

TEST_CASE("commutation matrices compose to the identity") {
  for (int p = 1; p <= 4; ++p) {
    for (int q = 1; q <= 4; ++q) {
      const Matrix prod = commutation_matrix(p, q) * commutation_matrix(q, p);
      CHECK((prod - Matrix::Identity(p * q, p * q)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("trace identity tr(K (P^T x Q)) = tr(P^T Q)") {
  std::mt19937_64 gen(13);
  const Matrix p = random_matrix(3, 3, gen);
  const Matrix q = random_matrix(3, 3, gen);
  const double lhs =
      (commutation_matrix(3, 3) * kron(p.transpose(), q)).trace();
  const double rhs = (p.transpose() * q).trace();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("kron basics") {
  Matrix b(2, 2);
  b << 1, 2, 3, 4;
  const Matrix bd = kron(Matrix::Identity(2, 2), b);
  CHECK(bd.rows() == 4);
  CHECK(bd.block(0, 0, 2, 2).isApprox(b));
  CHECK(bd.block(2, 2, 2, 2).isApprox(b));
  CHECK(bd.block(0, 2, 2, 2).isZero(0.0));

  Matrix s(1, 1);
  s << 2;
  CHECK(kron(s, Matrix::Identity(2, 2)).isApprox(2.0 * Matrix::Identity(2, 2)));
}

TEST_CASE("vec(EFG) = (G^T x E) vec(F)") {
  std::mt19937_64 gen(14);
  const Matrix e = random_matrix(2, 2, gen);
  const Matrix f = random_matrix(2, 2, gen);
  const Matrix g = random_matrix(2, 2, gen);
  const Vector lhs = vec(e * f * g);
  const Vector rhs = kron(g.transpose(), e) * vec(f);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("kron commutation identity (D x C) = K_sp (C x D) K_qt") {
  std::mt19937_64 gen(15);
  const int p = 2, q = 3, s = 3, t = 2;
  const Matrix c = random_matrix(p, q, gen);
  const Matrix d = random_matrix(s, t, gen);
  const Matrix lhs = kron(d, c);
  const Matrix rhs = commutation_matrix(s, p) * kron(c, d) * commutation_matrix(q, t);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("sym_sqrt reconstructs the matrix") {
  CHECK(sym_sqrt(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const Matrix sd = sym_sqrt(d);
  CHECK(sd(0, 0) == doctest::Approx(2.0));
  CHECK(sd(1, 1) == doctest::Approx(3.0));

  std::mt19937_64 gen(16);
  const Matrix m = random_spd(4, gen);
  const Matrix s = sym_sqrt(m);
  CHECK((s * s - m).cwiseAbs().maxCoeff() < 1e-10 * m.cwiseAbs().maxCoeff());
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-12 * s.cwiseAbs().maxCoeff());
}

TEST_CASE("sym_sqrt rejects non-PD input") {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;  // eigenvalues 3, -1
  CHECK_THROWS_AS((void)sym_sqrt(m), Error);

  Matrix asym(2, 2);
  asym << 1, 0.5, 0.1, 1;
  CHECK_THROWS_AS((void)sym_sqrt(asym), Error);
}
