#pragma once

// Weighted unit-vector systems: u_1..u_m on the sphere with weights c_i > 0.
// A system is isotropic when sum c_i u_i u_i^T = Id and centered when
// sum c_i u_i = 0; both together make a John decomposition of the identity.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isovec/errors.hpp"
#include "isovec/linalg.hpp"
#include "isovec/random.hpp"

namespace isovec {

inline constexpr double kUnitNormTolerance = 1e-10;
inline constexpr double kRenormalizeWindow = 1e-6;

class WeightedVectorSystem {
 public:
  /// Vectors whose norm is off by more than 1e-10 but within 1e-6 are
  /// renormalized; anything further off is rejected, as are non-positive weights.
  WeightedVectorSystem(std::size_t dim, std::vector<Vector> vectors, Vector weights)
      : dim_(dim), vectors_(std::move(vectors)), weights_(std::move(weights)) {
    if (dim_ == 0) throw InvalidArgument("system: dimension must be positive");
    if (vectors_.empty()) throw InvalidArgument("system: needs at least one vector");
    if (vectors_.size() != weights_.size())
      throw InvalidArgument("system: vector and weight counts differ");
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      Vector& u = vectors_[i];
      if (u.size() != dim_) throw DimensionError("system: vector " + std::to_string(i) + " has wrong length");
      for (double x : u)
        if (!std::isfinite(x)) throw InvalidArgument("system: non-finite coordinate");
      const double n = norm(u);
      if (std::abs(n - 1.0) > kRenormalizeWindow)
        throw InvalidArgument("system: vector " + std::to_string(i) + " is not a unit vector (norm " +
                              std::to_string(n) + ")");
      if (std::abs(n - 1.0) > kUnitNormTolerance)
        for (double& x : u) x /= n;
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
        throw InvalidArgument("system: weight " + std::to_string(i) + " must be positive");
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  const std::vector<Vector>& vectors() const { return vectors_; }
  const Vector& weights() const { return weights_; }
  const Vector& vector(std::size_t i) const { return vectors_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// sum c_i u_i u_i^T
  Matrix tensor_sum() const {
    Matrix s(dim_, dim_);
    for (std::size_t k = 0; k < size(); ++k)
      for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) s(i, j) += weights_[k] * vectors_[k][i] * vectors_[k][j];
    return s;
  }

  /// sum c_i u_i
  Vector weighted_center() const {
    Vector c(dim_, 0.0);
    for (std::size_t k = 0; k < size(); ++k)
      for (std::size_t i = 0; i < dim_; ++i) c[i] += weights_[k] * vectors_[k][i];
    return c;
  }

  double weight_sum() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
  }

  /// Probabilities c_i / d of the associated index distribution.
  Vector probabilities() const {
    Vector p(weights_);
    for (double& x : p) x /= static_cast<double>(dim_);
    return p;
  }

 private:
  std::size_t dim_;
  std::vector<Vector> vectors_;
  Vector weights_;
};

struct IsotropyReport {
  double tensor_residual = 0.0;  // ||sum c_i u_i u_i^T - Id||_F
  double center_residual = 0.0;  // |sum c_i u_i|
  double weight_sum = 0.0;
  double tolerance = 0.0;
  bool is_isotropic = false;
  bool is_centered = false;
};

inline IsotropyReport check(const WeightedVectorSystem& system, double tolerance) {
  IsotropyReport r;
  r.tensor_residual = (system.tensor_sum() - Matrix::identity(system.dim())).frobenius_norm();
  r.center_residual = norm(system.weighted_center());
  r.weight_sum = system.weight_sum();
  r.tolerance = tolerance;
  r.is_isotropic = r.tensor_residual <= tolerance;
  r.is_centered = r.center_residual <= tolerance;
  return r;
}

/// Discrete isotropic probability measure with atoms sqrt(d) u_i and masses c_i / d.
struct DiscreteMeasure {
  std::vector<Vector> atoms;
  Vector masses;
};

inline DiscreteMeasure to_measure(const WeightedVectorSystem& system) {
  if (!check(system, 1e-8).is_isotropic)
    throw PreconditionError("to_measure: system is not isotropic at tolerance 1e-8");
  const double d = static_cast<double>(system.dim());
  const double scale = std::sqrt(d);
  DiscreteMeasure mu;
  mu.atoms.reserve(system.size());
  for (const Vector& u : system.vectors()) {
    Vector a(u);
    for (double& x : a) x *= scale;
    mu.atoms.push_back(std::move(a));
  }
  mu.masses = system.probabilities();
  return mu;
}

/// Lifts u_i to sqrt(d/(d+1)) (u_i, 1/sqrt(d)) in R^{d+1} with weights
/// (d+1)/d c_i. The lifted vectors are unit vectors, and the lifted system is
/// isotropic exactly when the original is both isotropic and centered.
inline WeightedVectorSystem lift_centered(const WeightedVectorSystem& system) {
  const std::size_t d = system.dim();
  const double dd = static_cast<double>(d);
  const double s = std::sqrt(dd / (dd + 1.0));
  std::vector<Vector> lifted;
  Vector weights;
  for (std::size_t i = 0; i < system.size(); ++i) {
    Vector v(d + 1);
    for (std::size_t j = 0; j < d; ++j) v[j] = s * system.vector(i)[j];
    v[d] = s / std::sqrt(dd);
    lifted.push_back(std::move(v));
    weights.push_back((dd + 1.0) / dd * system.weight(i));
  }
  return {d + 1, std::move(lifted), std::move(weights)};
}

/// Inverse of lift_centered: drop the last coordinate, renormalize, and
/// scale weights by d/(d+1), where d is the dimension of the result.
inline WeightedVectorSystem unlift_centered(const WeightedVectorSystem& lifted) {
  if (lifted.dim() < 2) throw DimensionError("unlift_centered: lifted dimension must be at least 2");
  const std::size_t d = lifted.dim() - 1;
  const double dd = static_cast<double>(d);
  std::vector<Vector> vectors;
  Vector weights;
  for (std::size_t i = 0; i < lifted.size(); ++i) {
    Vector u(lifted.vector(i).begin(), lifted.vector(i).begin() + static_cast<std::ptrdiff_t>(d));
    const double n = norm(u);
    if (!(n > 0.0)) throw NumericalError("unlift_centered: lifted vector has no horizontal part");
    for (double& x : u) x /= n;
    vectors.push_back(std::move(u));
    weights.push_back(dd / (dd + 1.0) * lifted.weight(i));
  }
  return {d, std::move(vectors), std::move(weights)};
}

enum class SystemKind { Simplex, Cross, RandomFrame };

inline std::string_view to_string(SystemKind k) {
  switch (k) {
    case SystemKind::Simplex: return "simplex";
    case SystemKind::Cross: return "cross";
    case SystemKind::RandomFrame: return "random-frame";
  }
  return "";
}

inline SystemKind parse_system_kind(std::string_view s) {
  if (s == "simplex") return SystemKind::Simplex;
  if (s == "cross") return SystemKind::Cross;
  if (s == "random-frame") return SystemKind::RandomFrame;
  throw InvalidArgument("unknown system kind '" + std::string(s) + "'");
}

namespace detail {

// Vertices of the regular d-simplex inscribed in the unit sphere: the
// centered standard basis of R^{d+1}, written in an orthonormal basis of
// the hyperplane orthogonal to (1, ..., 1).
inline WeightedVectorSystem simplex_system(std::size_t d) {
  const std::size_t n = d + 1;
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix span(n, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < n; ++i) span(i, j) = (i == j ? 1.0 : 0.0) - inv_n;
  const Matrix q = householder_q(span);
  std::vector<Vector> vectors;
  for (std::size_t k = 0; k < n; ++k) {
    Vector u(d, 0.0);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < n; ++i) u[j] += q(i, j) * ((i == k ? 1.0 : 0.0) - inv_n);
    const double un = norm(u);
    for (double& x : u) x /= un;
    vectors.push_back(std::move(u));
  }
  return {d, std::move(vectors), Vector(n, static_cast<double>(d) / static_cast<double>(n))};
}

inline WeightedVectorSystem cross_system(std::size_t d) {
  std::vector<Vector> vectors;
  for (std::size_t i = 0; i < d; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vector u(d, 0.0);
      u[i] = sign;
      vectors.push_back(std::move(u));
    }
  }
  return {d, std::move(vectors), Vector(2 * d, 0.5)};
}

// Rows r_i of an m x d matrix with orthonormal columns satisfy
// sum r_i r_i^T = Id, so u_i = r_i/|r_i| with c_i = |r_i|^2 is isotropic.
inline WeightedVectorSystem random_frame_system(std::size_t d, std::size_t m, std::uint64_t seed) {
  for (std::uint64_t substream = 0;; ++substream) {
    CounterStream rng(seed, substream);
    std::normal_distribution<double> gauss;
    Matrix g(m, d);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < d; ++j) g(i, j) = gauss(rng);
    const Matrix q = householder_q(g);
    std::vector<Vector> vectors;
    Vector weights;
    bool degenerate = false;
    for (std::size_t i = 0; i < m && !degenerate; ++i) {
      Vector r(q.row(i).begin(), q.row(i).end());
      const double rn2 = dot(r, r);
      if (!(rn2 > 1e-24)) {
        degenerate = true;
        break;
      }
      const double rn = std::sqrt(rn2);
      for (double& x : r) x /= rn;
      vectors.push_back(std::move(r));
      weights.push_back(rn2);
    }
    if (!degenerate) return {d, std::move(vectors), std::move(weights)};
  }
}

}  // namespace detail

/// m is ignored for simplex (d+1 vectors) and cross (2d vectors); the seed is
/// required for random-frame.
inline WeightedVectorSystem generate(SystemKind kind, std::size_t d,
                                     std::optional<std::size_t> m = std::nullopt,
                                     std::optional<std::uint64_t> seed = std::nullopt) {
  if (d == 0) throw InvalidArgument("generate: dimension must be positive");
  switch (kind) {
    case SystemKind::Simplex:
      if (m && *m != d + 1) throw InvalidArgument("generate: simplex has exactly d+1 vectors");
      return detail::simplex_system(d);
    case SystemKind::Cross:
      if (m && *m != 2 * d) throw InvalidArgument("generate: cross-polytope has exactly 2d vectors");
      return detail::cross_system(d);
    case SystemKind::RandomFrame:
      if (!m) throw InvalidArgument("generate: random-frame needs m");
      if (*m < d) throw InvalidArgument("generate: random-frame needs m >= d");
      if (!seed) throw InvalidArgument("generate: random-frame needs a seed");
      return detail::random_frame_system(d, *m, *seed);
  }
  throw InvalidArgument("generate: unknown kind");
}

}  // namespace isovec
