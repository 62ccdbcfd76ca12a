#pragma once

// Dense small-dimension real linear algebra. Everything here is sized for
// d up to a few dozen; no blocking, no BLAS.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isovec/errors.hpp"

namespace isovec {

using Vector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
      throw DimensionError("Matrix: entry count does not match shape");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Builds the matrix whose j-th column is cols[j].
  static Matrix from_columns(const std::vector<Vector>& columns) {
    if (columns.empty()) return {};
    const std::size_t n = columns.front().size();
    Matrix m(n, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != n)
        throw DimensionError("from_columns: ragged columns");
      for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> entries() const { return data_; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  Vector column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(double s, Matrix a) { return a *= s; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matrix product: inner dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols_ != x.size()) throw DimensionError("matrix-vector product: dimension mismatch");
    Vector y(a.rows_, 0.0);
    for (std::size_t i = 0; i < a.rows_; ++i) y[i] = dot(a.row(i), x);
    return y;
  }

  double frobenius_norm() const { return norm(data_); }
  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionError("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Determinant by LU factorization with partial pivoting.
inline double det(Matrix m) {
  if (!m.square()) throw DimensionError("det: matrix is not square");
  const std::size_t n = m.rows();
  double result = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(m(i, k)) > best) {
        best = std::abs(m(i, k));
        pivot = i;
      }
    }
    if (best == 0.0) return 0.0;
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pivot, j));
      result = -result;
    }
    const double akk = m(k, k);
    result *= akk;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / akk;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return result;
}

/// Determinant of the matrix with the given vectors as columns.
inline double det_of_columns(const std::vector<Vector>& columns) {
  return det(Matrix::from_columns(columns));
}

/// u uᵀ
inline Matrix sym_outer(std::span<const double> u) {
  Matrix m(u.size(), u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) m(i, j) = u[i] * u[j];
  return m;
}

/// Orthogonal projection onto the complement of span(basis), where basis is
/// kept orthonormal as vectors are added.
class Projector {
 public:
  explicit Projector(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  const std::vector<Vector>& basis() const { return basis_; }
  std::size_t rank_removed() const { return basis_.size(); }

  Vector apply(std::span<const double> x) const {
    if (x.size() != dim_) throw DimensionError("Projector: dimension mismatch");
    Vector y(x.begin(), x.end());
    const double before = norm(y);
    sweep(y);
    // Second Gram-Schmidt pass when cancellation wiped out most of the norm.
    if (norm(y) <= 1e-12 * before) sweep(y);
    return y;
  }

  /// Adds direction x to the projected-out subspace; returns the normalized
  /// residual that joined the basis, or nothing if x already lies in it.
  std::optional<Vector> extend(std::span<const double> x, double tol = 1e-12) {
    Vector r = apply(x);
    // New basis vectors must stay orthonormal to ~1e-15, so refine once more
    // whenever the projection lost a noticeable fraction of the norm.
    if (norm(r) < 0.5 * norm(x)) sweep(r);
    const double n = norm(r);
    if (n <= tol * std::max(1.0, norm(x))) return std::nullopt;
    for (double& v : r) v /= n;
    basis_.push_back(r);
    return r;
  }

 private:
  void sweep(Vector& y) const {
    for (const Vector& b : basis_) {
      const double c = dot(b, y);
      for (std::size_t i = 0; i < dim_; ++i) y[i] -= c * b[i];
    }
  }

  std::size_t dim_;
  std::vector<Vector> basis_;
};

inline Vector project_out(const Projector& p, std::span<const double> x) { return p.apply(x); }

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // column j pairs with values[j]
};

/// Cyclic Jacobi eigensolver for symmetric matrices.
inline SymmetricEigen symmetric_eigen(Matrix a, double sym_tol = 1e-10) {
  if (!a.square()) throw DimensionError("symmetric_eigen: matrix is not square");
  const std::size_t n = a.rows();
  const double scale = std::max(1.0, a.frobenius_norm());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a(i, j) - a(j, i)) > sym_tol * scale)
        throw InvalidArgument("symmetric_eigen: matrix is not symmetric");

  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off <= 1e-30 * scale * scale) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

/// Applies f to the eigenvalues of a symmetric matrix: V f(Λ) Vᵀ.
template <typename F>
Matrix spectral_map(const SymmetricEigen& e, F&& f) {
  const std::size_t n = e.values.size();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double fk = f(e.values[k]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += e.vectors(i, k) * fk * e.vectors(j, k);
  }
  return out;
}

/// Symmetric square root of a PSD matrix. Eigenvalues in [-neg_tol, 0) are
/// clamped to zero.
inline Matrix psd_sqrt(const Matrix& m, double neg_tol = 1e-10) {
  const SymmetricEigen e = symmetric_eigen(m);
  if (!e.values.empty() && e.values.front() < -neg_tol)
    throw NumericalError("psd_sqrt: matrix is not positive semidefinite");
  return spectral_map(e, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

/// Lower-triangular Cholesky factor; throws NumericalError when not PD.
inline Matrix cholesky(const Matrix& a) {
  if (!a.square()) throw DimensionError("cholesky: matrix is not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) throw NumericalError("cholesky: matrix is not positive definite");
    l(j, j) = std::sqrt(s);
    for (std::size_t i = j + 1; i < n; ++i) {
      double t = a(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return l;
}

/// Inverse of a symmetric positive-definite matrix via Cholesky.
inline Matrix spd_inverse(const Matrix& a) {
  const Matrix l = cholesky(a);
  const std::size_t n = a.rows();
  Matrix linv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    linv(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s -= l(i, k) * linv(k, j);
      linv(i, j) = s / l(i, i);
    }
  }
  Matrix inv = linv.transposed() * linv;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) inv(j, i) = inv(i, j) = 0.5 * (inv(i, j) + inv(j, i));
  return inv;
}

/// Thin Q factor (rows × cols, orthonormal columns) of a tall matrix by
/// Householder reflections.
inline Matrix householder_q(const Matrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n) throw DimensionError("householder_q: matrix must be tall");
  Matrix r = a;
  std::vector<Vector> reflectors;
  reflectors.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Vector v(m - k);
    for (std::size_t i = k; i < m; ++i) v[i - k] = r(i, k);
    const double alpha = norm(v);
    Vector h = v;
    if (alpha > 0.0) {
      h[0] += std::copysign(alpha, v[0]);
      const double hn = norm(h);
      for (double& x : h) x /= hn;
      for (std::size_t j = k; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += h[i - k] * r(i, j);
        for (std::size_t i = k; i < m; ++i) r(i, j) -= 2.0 * s * h[i - k];
      }
    } else {
      std::fill(h.begin(), h.end(), 0.0);
    }
    reflectors.push_back(std::move(h));
  }
  Matrix q(m, n);
  for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
  for (std::size_t kk = n; kk-- > 0;) {
    const Vector& h = reflectors[kk];
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = kk; i < m; ++i) s += h[i - kk] * q(i, j);
      for (std::size_t i = kk; i < m; ++i) q(i, j) -= 2.0 * s * h[i - kk];
    }
  }
  return q;
}

struct SingularValues {
  Vector values;  // descending
  Matrix right;   // right singular vectors as columns, paired with values
};

/// One-sided Jacobi SVD; only the singular values and right vectors are kept.
inline SingularValues jacobi_svd(Matrix a) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix v = Matrix::identity(n);
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += a(i, p) * a(i, p);
          beta += a(i, q) * a(i, q);
          gamma += a(i, p) * a(i, q);
        }
        if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double x = a(i, p), y = a(i, q);
          a(i, p) = c * x - s * y;
          a(i, q) = s * x + c * y;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double x = v(i, p), y = v(i, q);
          v(i, p) = c * x - s * y;
          v(i, q) = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }
  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(a.column(j));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return sigma[x] > sigma[y]; });
  SingularValues out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = sigma[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.right(i, j) = v(i, order[j]);
  }
  return out;
}

}  // namespace isovec
