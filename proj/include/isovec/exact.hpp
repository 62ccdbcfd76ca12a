#pragma once

// Exact rational evaluation of the closed forms in bounds.hpp, for
// cross-checking the log-space routines on small arguments.

#include <cstddef>

#include <boost/multiprecision/cpp_int.hpp>

#include "isovec/bounds.hpp"
#include "isovec/errors.hpp"

namespace isovec::exact {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

inline Integer falling_factorial(std::size_t m, std::size_t d) {
  Integer r = 1;
  for (std::size_t i = 0; i < d; ++i) r *= Integer(m - i);
  return r;
}

/// gamma(d, m_bar) = m_bar^d / (m_bar (m_bar - 1) ... (m_bar - d + 1)).
inline Rational gamma(std::size_t d, std::size_t m) {
  if (d == 0 || m < d) throw InvalidArgument("exact::gamma: need m >= d >= 1");
  const std::size_t mb = capped_m(d, m);
  return Rational(boost::multiprecision::pow(Integer(mb), static_cast<unsigned>(d)),
                  falling_factorial(mb, d));
}

/// d! / d^d
inline Rational dr_volume_bound(std::size_t d) {
  if (d == 0) throw InvalidArgument("exact::dr_volume_bound: d must be positive");
  return Rational(falling_factorial(d, d), boost::multiprecision::pow(Integer(d), static_cast<unsigned>(d)));
}

}  // namespace isovec::exact
