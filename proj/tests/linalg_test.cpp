#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "isovec/linalg.hpp"
#include "oracles.hpp"

using namespace isovec;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

TEST(Det, IdentityIsOne) { EXPECT_EQ(det(Matrix::identity(2)), 1.0); }

TEST(Det, RepeatedColumnIsZero) { EXPECT_EQ(det_of_columns({{1, 0}, {1, 0}}), 0.0); }

TEST(Det, UnitVectorsAt120Degrees) {
  const double a = 2.0 * std::numbers::pi / 3.0;
  const double v = det_of_columns({{1, 0}, {std::cos(a), std::sin(a)}});
  EXPECT_NEAR(v * v, 0.75, 1e-15);
}

TEST(Det, SignFollowsColumnOrder) {
  EXPECT_NEAR(det_of_columns({{0, 1}, {1, 0}}), -1.0, 0.0);
  EXPECT_NEAR(det(Matrix(3, 3, {0, 0, 2, 0, 3, 0, 5, 0, 0})), -30.0, 1e-12);
}

TEST(Det, NonSquareThrows) { EXPECT_THROW(det(Matrix(2, 3)), DimensionError); }

TEST(Det, MatchesEigenAndIsMultiplicative) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix a = random_matrix(3, 3, rng), b = random_matrix(3, 3, rng);
    const double da = det(a), db = det(b), dab = det(a * b);
    EXPECT_NEAR(da, to_eigen(a).determinant(), 1e-12 * std::max(1.0, std::abs(da)));
    EXPECT_NEAR(dab, da * db, 1e-9 * std::max(1.0, std::abs(dab)));
  }
}

TEST(Det, HadamardInequality) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t d = 1 + rep % 6;
    const Matrix a = random_matrix(d, d, rng);
    double prod = 1.0;
    for (std::size_t j = 0; j < d; ++j) prod *= dot(a.column(j), a.column(j));
    const double v = det(a);
    EXPECT_LE(v * v, prod * (1 + 1e-12));
  }
}

TEST(SymOuter, Examples) {
  const Matrix e1 = sym_outer(Vector{1, 0});
  EXPECT_EQ(e1(0, 0), 1.0);
  EXPECT_EQ(e1(0, 1), 0.0);
  EXPECT_EQ(e1(1, 1), 0.0);

  const double r = 1.0 / std::sqrt(2.0);
  const Matrix h = sym_outer(Vector{r, r});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(h(i, j), 0.5, 1e-15);

  const Matrix z = sym_outer(Vector{0, 0, 0});
  EXPECT_EQ(z.frobenius_norm(), 0.0);
}

TEST(SymOuter, TraceIsSquaredNorm) {
  const Vector u{1, -2, 3};
  const Matrix m = sym_outer(u);
  EXPECT_NEAR(m.trace(), 14.0, 1e-14);
  EXPECT_EQ(m(0, 2), m(2, 0));
}

TEST(ProjectOut, Examples) {
  Projector p(2);
  EXPECT_EQ(project_out(p, Vector{3, 4}), (Vector{3, 4}));
  p.extend(Vector{1, 0});
  const Vector y = project_out(p, Vector{3, 4});
  EXPECT_NEAR(y[0], 0.0, 1e-15);
  EXPECT_NEAR(y[1], 4.0, 1e-15);

  Projector diag(2);
  diag.extend(Vector{1, 1});
  const Vector z = project_out(diag, Vector{1, 0});
  EXPECT_NEAR(z[0], 0.5, 1e-15);
  EXPECT_NEAR(z[1], -0.5, 1e-15);
}

TEST(ProjectOut, DimensionMismatchThrows) {
  Projector p(3);
  EXPECT_THROW(project_out(p, Vector{1, 2}), DimensionError);
}

TEST(ProjectOut, IdempotentAndNormNonincreasing) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 2 + rep % 6;
    Projector p(d);
    for (std::size_t k = 0; k < 1 + rep % (d - 1); ++k) {
      Vector v(d);
      for (double& x : v) x = g(rng);
      p.extend(v);
    }
    for (std::size_t i = 0; i < p.basis().size(); ++i)
      for (std::size_t j = 0; j < p.basis().size(); ++j)
        EXPECT_NEAR(dot(p.basis()[i], p.basis()[j]), i == j ? 1.0 : 0.0, 1e-12);
    Vector x(d);
    for (double& v : x) v = g(rng);
    const Vector y = project_out(p, x);
    const Vector yy = project_out(p, y);
    EXPECT_LE(norm(y), norm(x) * (1 + 1e-15));
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(yy[i], y[i], 1e-12);
  }
}

TEST(PsdSqrt, Examples) {
  const Matrix i = psd_sqrt(Matrix::identity(3));
  EXPECT_NEAR((i - Matrix::identity(3)).frobenius_norm(), 0.0, 1e-15);

  const Matrix s = psd_sqrt(Matrix(2, 2, {4, 0, 0, 9}));
  EXPECT_NEAR(s(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(s(1, 1), 3.0, 1e-14);
  EXPECT_NEAR(s(0, 1), 0.0, 1e-14);

  // Eigenvalues 3 and 1 with eigenvectors (1,1)/sqrt2 and (1,-1)/sqrt2.
  const Matrix a(2, 2, {2, 1, 1, 2});
  const Matrix r = psd_sqrt(a);
  const double p = (std::sqrt(3.0) + 1.0) / 2.0, q = (std::sqrt(3.0) - 1.0) / 2.0;
  EXPECT_NEAR(r(0, 0), p, 1e-14);
  EXPECT_NEAR(r(0, 1), q, 1e-14);
  EXPECT_NEAR((r * r - a).frobenius_norm(), 0.0, 1e-13);
}

TEST(PsdSqrt, NegativeEigenvalueThrows) {
  EXPECT_THROW(psd_sqrt(Matrix(2, 2, {1, 0, 0, -1e-3})), NumericalError);
  EXPECT_NO_THROW(psd_sqrt(Matrix(2, 2, {1, 0, 0, -1e-12})));
}

TEST(PsdSqrt, RoundTripOnIllConditionedMatrices) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> logu(0.0, 6.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t d = 2 + rep % 7;
    const Matrix q = householder_q(random_matrix(d, d, rng));
    Matrix lam(d, d);
    lam(0, 0) = 1.0;
    lam(1, 1) = 1e-6;
    for (std::size_t i = 2; i < d; ++i) lam(i, i) = std::pow(10.0, -logu(rng));
    const Matrix a = q * lam * q.transposed();
    const Matrix s = psd_sqrt(a);
    EXPECT_LE((s * s - a).frobenius_norm(), 1e-8);
    EXPECT_NEAR((s - s.transposed()).frobenius_norm(), 0.0, 1e-12);
  }
}

TEST(SymmetricEigen, MatchesEigen) {
  std::mt19937_64 rng(15);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + rep % 8;
    const Matrix b = random_matrix(d, d, rng);
    const Matrix a = b + b.transposed();
    const auto mine = symmetric_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(a));
    for (std::size_t i = 0; i < d; ++i) EXPECT_NEAR(mine.values[i], ref.eigenvalues()(i), 1e-11);
  }
}

TEST(HouseholderQ, OrthonormalColumnsSpanningInput) {
  std::mt19937_64 rng(16);
  const Matrix a = random_matrix(20, 4, rng);
  const Matrix q = householder_q(a);
  EXPECT_NEAR((q.transposed() * q - Matrix::identity(4)).frobenius_norm(), 0.0, 1e-13);
  // Projecting A onto range(Q) leaves it unchanged.
  const Matrix back = q * (q.transposed() * a);
  EXPECT_NEAR((back - a).frobenius_norm(), 0.0, 1e-12);
}

TEST(Cholesky, InverseOfSpd) {
  std::mt19937_64 rng(17);
  const Matrix b = random_matrix(5, 5, rng);
  const Matrix a = b * b.transposed() + Matrix::identity(5);
  EXPECT_NEAR((spd_inverse(a) * a - Matrix::identity(5)).frobenius_norm(), 0.0, 1e-12);
  EXPECT_THROW(cholesky(Matrix(2, 2, {1, 2, 2, 1})), NumericalError);
}

TEST(JacobiSvd, MatchesEigenSingularValues) {
  std::mt19937_64 rng(18);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t r = 2 + rep % 5, c = 2 + (rep * 7) % 9;
    const Matrix a = random_matrix(r, c, rng);
    const auto mine = jacobi_svd(a);
    Eigen::JacobiSVD<Eigen::MatrixXd> ref(to_eigen(a));
    for (std::size_t i = 0; i < std::min(r, c); ++i)
      EXPECT_NEAR(mine.values[i], ref.singularValues()(i), 1e-12);
    for (std::size_t i = std::min(r, c); i < c; ++i) EXPECT_NEAR(mine.values[i], 0.0, 1e-12);
    // The trailing right singular vector of a wide matrix is a null vector.
    if (c > r) {
      const Vector v = mine.right.column(c - 1);
      EXPECT_NEAR(norm(a * v), 0.0, 1e-12);
    }
  }
}
