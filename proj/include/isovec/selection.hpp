#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "isovec/combinatorics.hpp"
#include "isovec/errors.hpp"
#include "isovec/linalg.hpp"
#include "isovec/systems.hpp"

namespace isovec {

/// Output of the greedy Dvoretzky-Rogers selection. indices[j] is x_j,
/// basis[j] is b_j, and x_j lies in span{b_0..b_j}.
struct SelectionCertificate {
  std::vector<std::size_t> indices;
  std::vector<Vector> basis;
  Vector step_norms;  // |Q_j x_j|
  double det_squared = 0.0;
  /// sum_i c_i |Q_j u_i|^2 at every step; equals d - j for an isotropic system
  /// (0-based j), which is what forces the greedy maximum above sqrt((d-j)/d).
  Vector weighted_projection_mass;
};

/// Greedy selection: at each step pick the vector with the largest component
/// orthogonal to the ones already picked (ties to the lowest index).
inline SelectionCertificate dr_select(const WeightedVectorSystem& system) {
  const std::size_t d = system.dim();
  if (system.size() < d) throw PreconditionError("dr_select: need at least d vectors");
  if (!check(system, 1e-8).is_isotropic)
    throw PreconditionError("dr_select: system is not isotropic at tolerance 1e-8");

  SelectionCertificate cert;
  Projector q(d);
  for (std::size_t step = 0; step < d; ++step) {
    std::size_t best = 0;
    double best_norm = -1.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
      const double n = norm(q.apply(system.vector(i)));
      mass += system.weight(i) * n * n;
      if (n > best_norm) {
        best_norm = n;
        best = i;
      }
    }
    if (best_norm <= 1e-10)
      throw NumericalError("dr_select: selection stalled; every remaining projection vanishes");
    const auto b = q.extend(system.vector(best));
    if (!b) throw NumericalError("dr_select: picked vector lies in the current span");
    cert.indices.push_back(best);
    cert.basis.push_back(*b);
    cert.step_norms.push_back(best_norm);
    cert.weighted_projection_mass.push_back(mass);
  }
  std::vector<Vector> cols;
  for (std::size_t i : cert.indices) cols.push_back(system.vector(i));
  const double dt = det_of_columns(cols);
  cert.det_squared = dt * dt;
  return cert;
}

struct BestSubset {
  std::vector<std::size_t> indices;
  double det_squared = 0.0;
};

inline constexpr double kBestSubsetGuard = 1e7;

/// Exhaustive maximum of det^2 over all d-subsets. Values within 1e-12
/// (relative) count as ties and the lexicographically first subset wins.
inline BestSubset best_subset(const WeightedVectorSystem& system) {
  const std::size_t d = system.dim(), m = system.size();
  if (m < d) throw PreconditionError("best_subset: need at least d vectors");
  if (binomial(m, d) > kBestSubsetGuard)
    throw TooLargeError("best_subset: C(m, d) exceeds the enumeration guard of 1e7");
  BestSubset best;
  best.det_squared = -1.0;
  Matrix cols(d, d);
  for_each_subset(m, d, [&](const std::vector<std::size_t>& idx) {
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) cols(i, j) = system.vector(idx[j])[i];
    const double dt = det(cols);
    if (dt * dt > best.det_squared * (1.0 + 1e-12)) {
      best.det_squared = dt * dt;
      best.indices = idx;
    }
  });
  return best;
}

}  // namespace isovec
