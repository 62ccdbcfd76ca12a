#pragma once

// Closed-form quantities around the Dvoretzky-Rogers volume bound and its
// Pelczynski-Szarek improvement factor
//   gamma(d, m) = m^d / (d! * C(m, d)),   evaluated at m_bar = min(m, d(d+1)/2).
// Everything is returned in natural-log space so d in the thousands is fine.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "isovec/errors.hpp"

namespace isovec {

struct LogValue {
  double log_value = 0.0;
  int sign = 1;  // +1, or 0 for the value zero

  double value() const { return sign == 0 ? 0.0 : std::exp(log_value); }

  static LogValue zero() { return {-INFINITY, 0}; }
  static LogValue from_log(double l) { return {l, 1}; }

  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.sign == 0 || b.sign == 0) return zero();
    return {a.log_value + b.log_value, 1};
  }
  friend LogValue operator/(LogValue a, LogValue b) {
    if (b.sign == 0) throw InvalidArgument("LogValue: division by zero");
    if (a.sign == 0) return zero();
    return {a.log_value - b.log_value, 1};
  }
};

inline double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// d(d+1)/2: the largest support an isotropic system ever needs.
inline std::size_t isotropic_cap(std::size_t d) { return d * (d + 1) / 2; }

/// d(d+3)/2: the same for isotropic and centered systems.
inline std::size_t centered_cap(std::size_t d) { return d * (d + 3) / 2; }

inline std::size_t capped_m(std::size_t d, std::size_t m) { return std::min(m, isotropic_cap(d)); }

/// Uncapped m^d / (d! C(m, d)) = m^d (m-d)! / m!.
inline LogValue gamma_uncapped(std::size_t d, std::size_t m) {
  if (d == 0) throw InvalidArgument("gamma: d must be positive");
  if (m < d) throw InvalidArgument("gamma: m must be at least d");
  const double md = static_cast<double>(m);
  // log(m^d / (m)_d) = -sum log1p(-k/m); the lgamma difference cancels badly for large d.
  if (d > 10'000'000)
    return LogValue::from_log(static_cast<double>(d) * std::log(md) - log_factorial(m) + log_factorial(m - d));
  double s = 0.0;
  for (std::size_t k = 1; k < d; ++k) s -= std::log1p(-static_cast<double>(k) / md);
  return LogValue::from_log(s);
}

/// gamma(d, m_bar) with m_bar = min(m, d(d+1)/2).
inline LogValue gamma(std::size_t d, std::size_t m) {
  if (d == 0) throw InvalidArgument("gamma: d must be positive");
  if (m < d) throw InvalidArgument("gamma: m must be at least d");
  return gamma_uncapped(d, capped_m(d, m));
}

/// d! / d^d
inline LogValue dr_volume_bound(std::size_t d) {
  if (d == 0) throw InvalidArgument("dr_volume_bound: d must be positive");
  return LogValue::from_log(log_factorial(d) - static_cast<double>(d) * std::log(static_cast<double>(d)));
}

/// Probability that d i.i.d. draws from p are pairwise distinct,
/// d! e_d(p_1, ..., p_m). Carries f_k = k! e_k through the product
/// prod (1 + p_i t) truncated at degree d; every term is nonnegative.
inline double p1_exact(std::span<const double> probabilities, std::size_t d) {
  if (probabilities.empty()) throw InvalidArgument("p1_exact: empty distribution");
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("p1_exact: probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("p1_exact: probabilities must sum to 1");
  if (d == 0) return 1.0;
  if (d > probabilities.size()) return 0.0;
  std::vector<double> f(d + 1, 0.0);
  f[0] = 1.0;
  std::size_t seen = 0;
  for (double p : probabilities) {
    ++seen;
    for (std::size_t k = std::min(seen, d); k >= 1; --k) f[k] += static_cast<double>(k) * p * f[k - 1];
  }
  return f[d];
}

/// Upper bound d! C(m, d) / m^d on p1_exact, attained at the uniform distribution.
inline LogValue p1_uniform(std::size_t d, std::size_t m) {
  if (d > m) return LogValue::zero();
  return LogValue::from_log(log_factorial(m) - log_factorial(m - d) -
                            static_cast<double>(d) * std::log(static_cast<double>(m)));
}

struct LinearRegime {
  double c;  // m = ceil(c d)
};
struct AdditiveRegime {
  std::size_t k;  // m = d + k
};
using AsymptoticRegime = std::variant<LinearRegime, AdditiveRegime>;

/// m for which the regime's asymptotic formula describes gamma(d, m).
inline std::size_t regime_m(std::size_t d, const AsymptoticRegime& regime) {
  if (const auto* lin = std::get_if<LinearRegime>(&regime))
    return static_cast<std::size_t>(std::ceil(lin->c * static_cast<double>(d) - 1e-12));
  return d + std::get<AdditiveRegime>(regime).k;
}

/// Leading-order Stirling forms of gamma(d, m):
///   linear   (m ~ c d):  sqrt((c-1)/c) ((c-1)/c)^{(c-1)d} e^d
///   additive (m = d+k):  k! e^k / sqrt(2 pi) * e^d / (d+k)^{k+1/2}
inline LogValue gamma_asymptotic(std::size_t d, const AsymptoticRegime& regime) {
  if (d == 0) throw InvalidArgument("gamma_asymptotic: d must be positive");
  const double dd = static_cast<double>(d);
  if (const auto* lin = std::get_if<LinearRegime>(&regime)) {
    const double c = lin->c;
    if (!(c > 1.0) || c < 1.0 + 1.0 / dd - 1e-12)
      throw InvalidArgument("gamma_asymptotic: linear regime needs c > 1 and c >= 1 + 1/d");
    const double r = std::log((c - 1.0) / c);
    return LogValue::from_log(0.5 * r + (c - 1.0) * dd * r + dd);
  }
  const std::size_t k = std::get<AdditiveRegime>(regime).k;
  if (k == 0) throw InvalidArgument("gamma_asymptotic: additive regime needs k >= 1");
  const double kk = static_cast<double>(k);
  return LogValue::from_log(log_factorial(k) + kk - 0.5 * std::log(2.0 * std::numbers::pi) + dd -
                            (kk + 0.5) * std::log(dd + kk));
}

}  // namespace isovec
