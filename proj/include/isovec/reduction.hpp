#pragma once

// Constructive Caratheodory reduction of isotropic systems. The matrices
// u_i u_i^T all have trace one, so they live in an affine space of dimension
// d(d+1)/2 - 1; any d(d+1)/2 + 1 of them are affinely dependent, and shifting
// weight along a dependence zeroes an atom without changing sum c_i u_i u_i^T
// or sum c_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "isovec/bounds.hpp"
#include "isovec/errors.hpp"
#include "isovec/linalg.hpp"
#include "isovec/systems.hpp"

namespace isovec {

struct AffineDependence {
  Vector coefficients;  // sum = 0 and sum lambda_i A_i = 0; scaled so max |lambda_i| = 1
};

inline constexpr double kDependenceRankThreshold = 1e-10;

namespace detail {

// Upper triangle of a symmetric matrix with off-diagonal entries scaled by
// sqrt(2), so Euclidean length equals Frobenius norm.
inline Vector symmetric_coordinates(const Matrix& a) {
  Vector v;
  v.reserve(a.rows() * (a.rows() + 1) / 2);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    v.push_back(a(i, i));
    for (std::size_t j = i + 1; j < a.cols(); ++j) v.push_back(std::sqrt(2.0) * 0.5 * (a(i, j) + a(j, i)));
  }
  return v;
}

inline std::optional<AffineDependence> affine_dependence_of_coordinates(const std::vector<Vector>& coords) {
  const std::size_t k = coords.size();
  if (k < 2) return std::nullopt;
  const std::size_t n = coords.front().size();
  Matrix b(n + 1, k);
  for (std::size_t j = 0; j < k; ++j) {
    if (coords[j].size() != n) throw DimensionError("affine_dependence: points differ in size");
    for (std::size_t i = 0; i < n; ++i) b(i, j) = coords[j][i];
    b(n, j) = 1.0;
  }
  const SingularValues svd = jacobi_svd(b);
  const double smallest = svd.values.back();
  if (smallest > kDependenceRankThreshold * svd.values.front()) return std::nullopt;
  AffineDependence dep{svd.right.column(k - 1)};
  double scale = 0.0;
  for (double x : dep.coefficients) scale = std::max(scale, std::abs(x));
  for (double& x : dep.coefficients) x /= scale;
  return dep;
}

struct ReducedWeights {
  std::vector<std::size_t> kept;  // indices into the input, ascending
  Vector weights;
};

// Weight-shifting loop shared by both reducers. Each pass searches for a
// dependence among the first bound + 2 surviving atoms only.
inline ReducedWeights caratheodory_reduce(const std::vector<Vector>& coords, Vector weights,
                                          std::size_t bound) {
  std::vector<std::size_t> alive(coords.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
  while (alive.size() > bound) {
    const std::size_t window = std::min(alive.size(), bound + 2);
    std::vector<Vector> pts;
    for (std::size_t j = 0; j < window; ++j) pts.push_back(coords[alive[j]]);
    auto dep = affine_dependence_of_coordinates(pts);
    if (!dep)
      throw NumericalError("reduction: no affine dependence found above the Caratheodory bound");
    Vector& lambda = dep->coefficients;
    if (std::none_of(lambda.begin(), lambda.end(), [](double x) { return x > 0.0; }))
      for (double& x : lambda) x = -x;

    std::size_t pivot = window;
    double t = INFINITY;
    for (std::size_t j = 0; j < window; ++j) {
      if (lambda[j] <= 0.0) continue;
      const double ratio = weights[alive[j]] / lambda[j];
      if (ratio < t) {
        t = ratio;
        pivot = j;
      }
    }
    for (std::size_t j = 0; j < window; ++j) weights[alive[j]] -= t * lambda[j];
    weights[alive[pivot]] = 0.0;

    std::vector<std::size_t> next;
    next.reserve(alive.size());
    for (std::size_t idx : alive)
      if (weights[idx] > 0.0) next.push_back(idx);
    alive = std::move(next);
  }
  ReducedWeights out;
  out.kept = alive;
  for (std::size_t idx : alive) out.weights.push_back(weights[idx]);
  return out;
}

inline std::vector<Vector> outer_coordinates(const WeightedVectorSystem& system) {
  std::vector<Vector> coords;
  coords.reserve(system.size());
  for (const Vector& u : system.vectors()) coords.push_back(symmetric_coordinates(sym_outer(u)));
  return coords;
}

}  // namespace detail

/// Nontrivial lambda with sum lambda_i = 0 and sum lambda_i A_i = 0, or
/// nothing when the symmetric matrices are affinely independent.
inline std::optional<AffineDependence> affine_dependence(const std::vector<Matrix>& points) {
  std::vector<Vector> coords;
  coords.reserve(points.size());
  for (const Matrix& a : points) {
    if (!a.square()) throw DimensionError("affine_dependence: matrices must be square");
    coords.push_back(detail::symmetric_coordinates(a));
  }
  return detail::affine_dependence_of_coordinates(coords);
}

struct ReductionResult {
  WeightedVectorSystem system;
  std::vector<std::size_t> source_indices;  // position i came from input index source_indices[i]
};

inline ReductionResult reduce_isotropic_traced(const WeightedVectorSystem& system) {
  if (!check(system, 1e-8).is_isotropic)
    throw PreconditionError("reduce_isotropic: system is not isotropic at tolerance 1e-8");
  const std::size_t bound = isotropic_cap(system.dim());
  auto reduced = detail::caratheodory_reduce(detail::outer_coordinates(system), system.weights(), bound);
  std::vector<Vector> vectors;
  for (std::size_t i : reduced.kept) vectors.push_back(system.vector(i));
  return {WeightedVectorSystem(system.dim(), std::move(vectors), std::move(reduced.weights)),
          std::move(reduced.kept)};
}

/// Shrinks an isotropic system to at most d(d+1)/2 of its own vectors.
inline WeightedVectorSystem reduce_isotropic(const WeightedVectorSystem& system) {
  return reduce_isotropic_traced(system).system;
}

inline ReductionResult reduce_centered_traced(const WeightedVectorSystem& system) {
  const IsotropyReport r = check(system, 1e-8);
  if (!r.is_isotropic || !r.is_centered)
    throw PreconditionError("reduce_centered: system is not isotropic and centered at tolerance 1e-8");
  const std::size_t d = system.dim();
  const WeightedVectorSystem lifted = lift_centered(system);
  auto reduced =
      detail::caratheodory_reduce(detail::outer_coordinates(lifted), lifted.weights(), centered_cap(d));
  const double back = static_cast<double>(d) / static_cast<double>(d + 1);
  std::vector<Vector> vectors;
  Vector weights;
  for (std::size_t k = 0; k < reduced.kept.size(); ++k) {
    vectors.push_back(system.vector(reduced.kept[k]));
    weights.push_back(back * reduced.weights[k]);
  }
  return {WeightedVectorSystem(d, std::move(vectors), std::move(weights)), std::move(reduced.kept)};
}

/// Shrinks an isotropic, centered system to at most d(d+3)/2 of its own vectors.
inline WeightedVectorSystem reduce_centered(const WeightedVectorSystem& system) {
  return reduce_centered_traced(system).system;
}

}  // namespace isovec
