#pragma once

// Minimum-volume origin-centered enclosing ellipsoid (Loewner ellipsoid) of a
// point cloud, solved on the dual:
//
//   maximize  log det X(q),   X(q) = sum q_i p_i p_i^T,   q in the simplex.
//
// At the optimum every point satisfies p_i^T X^{-1} p_i <= d with equality on
// the support of q, and the ellipsoid is {x : x^T (X^{-1}/d) x <= 1}. Those
// optimality conditions are exactly a decomposition of the identity, which is
// how john_from_points turns a cloud into a WeightedVectorSystem.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "isovec/errors.hpp"
#include "isovec/linalg.hpp"
#include "isovec/systems.hpp"

namespace isovec {

struct MveeResult {
  Matrix shape;                              // M with ellipsoid {x : x^T M x <= 1}
  std::vector<std::size_t> support_indices;  // ascending
  Vector dual_weights;                       // paired with support_indices, sum 1
  std::size_t iterations = 0;
  double max_violation = 0.0;  // max_i p_i^T X^{-1} p_i - d; <= d * epsilon at convergence
};

class DegenerateInputError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MveeNonConvergence : public NumericalError {
 public:
  MveeNonConvergence(const std::string& what, MveeResult best)
      : NumericalError(what), best_(std::move(best)) {}
  const MveeResult& best_iterate() const { return best_; }

 private:
  MveeResult best_;
};

namespace detail {

inline Matrix weighted_scatter(const std::vector<Vector>& points, const Vector& q) {
  const std::size_t d = points.front().size();
  Matrix x(d, d);
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (q[k] == 0.0) continue;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) x(i, j) += q[k] * points[k][i] * points[k][j];
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) x(i, j) = x(j, i);
  return x;
}

inline double quad_form(const Matrix& a, const Vector& p) { return dot(p, a * p); }

inline MveeResult package(const std::vector<Vector>& points, const Vector& q, const Matrix& xinv,
                          std::size_t iterations) {
  const double d = static_cast<double>(points.front().size());
  MveeResult r;
  r.shape = xinv * (1.0 / d);
  r.iterations = iterations;
  double worst = -INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i) {
    worst = std::max(worst, quad_form(xinv, points[i]) - d);
    if (q[i] > 0.0) {
      r.support_indices.push_back(i);
      r.dual_weights.push_back(q[i]);
    }
  }
  r.max_violation = worst;
  return r;
}

}  // namespace detail

/// Frank-Wolfe coordinate ascent with away steps (Khachiyan / Todd-Yildirim)
/// from uniform weights. Stops once every point has p^T X^{-1} p <= d(1+eps)
/// and every support point has p^T X^{-1} p >= d(1-eps). Dual weights below
/// eps/n are then dropped and the rest renormalized.
inline MveeResult solve_central_mvee(const std::vector<Vector>& points, double epsilon,
                                     std::size_t max_iterations = 100000) {
  if (points.empty()) throw InvalidArgument("mvee: no points");
  const std::size_t d = points.front().size(), n = points.size();
  for (const Vector& p : points)
    if (p.size() != d) throw DimensionError("mvee: points differ in dimension");
  if (d == 0) throw InvalidArgument("mvee: zero-dimensional points");
  if (n < d) throw DegenerateInputError("mvee: fewer points than dimensions");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("mvee: epsilon must lie in (0, 1)");

  const double dd = static_cast<double>(d);
  Vector q(n, 1.0 / static_cast<double>(n));
  {
    const SymmetricEigen e = symmetric_eigen(detail::weighted_scatter(points, q));
    if (!(e.values.front() > 1e-12 * e.values.back()))
      throw DegenerateInputError("mvee: points do not span the space");
  }

  Matrix xinv;
  Vector kappa(n);
  std::size_t it = 0;
  const double drop_below = epsilon / static_cast<double>(n);
  while (true) {
    xinv = spd_inverse(detail::weighted_scatter(points, q));
    std::size_t up = 0, down = n;
    for (std::size_t i = 0; i < n; ++i) {
      kappa[i] = detail::quad_form(xinv, points[i]);
      if (kappa[i] > kappa[up]) up = i;
      if (q[i] > 0.0 && (down == n || kappa[i] < kappa[down])) down = i;
    }
    const double eps_plus = kappa[up] / dd - 1.0;
    const double eps_minus = 1.0 - kappa[down] / dd;

    if (std::max(eps_plus, eps_minus) <= epsilon) {
      // Prune numerically negligible duals; keep iterating if pruning spoiled
      // the optimality conditions.
      bool pruned = false;
      for (double& w : q)
        if (w > 0.0 && w < drop_below) {
          w = 0.0;
          pruned = true;
        }
      if (!pruned) return detail::package(points, q, xinv, it);
      double s = 0.0;
      for (double w : q) s += w;
      for (double& w : q) w /= s;
      continue;
    }

    if (it >= max_iterations)
      throw MveeNonConvergence("mvee: iteration limit reached before the duality gap closed",
                               detail::package(points, q, xinv, it));
    ++it;

    if (eps_plus >= eps_minus) {
      const double k = kappa[up];
      const double alpha = (k - dd) / (dd * (k - 1.0));
      for (double& w : q) w *= 1.0 - alpha;
      q[up] += alpha;
    } else {
      const double k = kappa[down];
      const double alpha_max = q[down] / (1.0 - q[down]);
      double alpha = k > 1.0 ? (dd - k) / (dd * (k - 1.0)) : alpha_max;
      const bool drop = alpha >= alpha_max;
      if (drop) alpha = alpha_max;
      for (double& w : q) w *= 1.0 + alpha;
      q[down] = drop ? 0.0 : q[down] - alpha;
    }
  }
}

/// Extracts a decomposition of the identity from the enclosing ellipsoid.
///
/// Non-centered: u_i = normalize(M^{1/2} p_i), c_i = d q_i on the support.
/// Centered: points are lifted to (p_i, 1) in R^{d+1}; the lifted optimum gives
/// a center c = sum q_i p_i and covariance S = sum q_i (p_i - c)(p_i - c)^T,
/// and the lifted system is written in the basis where each lifted vector is
/// normalize(S^{-1/2}(p_i - c), 1). Undoing the lift then yields u_i
/// proportional to S^{-1/2}(p_i - c) with c_i = d q_i, which is both isotropic
/// and centered.
inline WeightedVectorSystem john_from_points(const std::vector<Vector>& points, bool centered,
                                             double epsilon, std::size_t max_iterations = 100000) {
  if (points.empty()) throw InvalidArgument("john_from_points: no points");
  const std::size_t d = points.front().size();

  if (!centered) {
    const MveeResult r = solve_central_mvee(points, epsilon, max_iterations);
    const Matrix root = psd_sqrt(r.shape);
    std::vector<Vector> vectors;
    Vector weights;
    for (std::size_t k = 0; k < r.support_indices.size(); ++k) {
      Vector u = root * points[r.support_indices[k]];
      const double n = norm(u);
      for (double& x : u) x /= n;
      vectors.push_back(std::move(u));
      weights.push_back(static_cast<double>(d) * r.dual_weights[k]);
    }
    return {d, std::move(vectors), std::move(weights)};
  }

  std::vector<Vector> lifted;
  lifted.reserve(points.size());
  for (const Vector& p : points) {
    if (p.size() != d) throw DimensionError("john_from_points: points differ in dimension");
    Vector v(p);
    v.push_back(1.0);
    lifted.push_back(std::move(v));
  }
  const MveeResult r = solve_central_mvee(lifted, epsilon, max_iterations);

  Vector center(d, 0.0);
  for (std::size_t k = 0; k < r.support_indices.size(); ++k)
    for (std::size_t i = 0; i < d; ++i) center[i] += r.dual_weights[k] * points[r.support_indices[k]][i];
  Matrix cov(d, d);
  for (std::size_t k = 0; k < r.support_indices.size(); ++k) {
    const Vector& p = points[r.support_indices[k]];
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        cov(i, j) += r.dual_weights[k] * (p[i] - center[i]) * (p[j] - center[j]);
  }
  const Matrix whiten = psd_sqrt(spd_inverse(cov));

  std::vector<Vector> lifted_vectors;
  Vector lifted_weights;
  for (std::size_t k = 0; k < r.support_indices.size(); ++k) {
    Vector diff = points[r.support_indices[k]];
    for (std::size_t i = 0; i < d; ++i) diff[i] -= center[i];
    Vector v = whiten * diff;
    v.push_back(1.0);
    const double n = norm(v);
    for (double& x : v) x /= n;
    lifted_vectors.push_back(std::move(v));
    lifted_weights.push_back(static_cast<double>(d + 1) * r.dual_weights[k]);
  }
  return unlift_centered(WeightedVectorSystem(d + 1, std::move(lifted_vectors), std::move(lifted_weights)));
}

}  // namespace isovec
