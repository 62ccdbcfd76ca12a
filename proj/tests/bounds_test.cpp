#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "isovec/bounds.hpp"
#include "isovec/exact.hpp"
#include "oracles.hpp"

using namespace isovec;

TEST(Gamma, SmallValues) {
  EXPECT_NEAR(gamma(1, 1).value(), 1.0, 1e-15);
  EXPECT_NEAR(gamma(2, 3).value(), 1.5, 1e-14);
  EXPECT_NEAR(gamma(3, 100).value(), 1.8, 1e-14);  // capped at m_bar = 6
  EXPECT_EQ(exact::gamma(2, 3), exact::Rational(3, 2));
  EXPECT_EQ(exact::gamma(3, 100), exact::Rational(9, 5));
}

TEST(Gamma, InvalidArguments) {
  EXPECT_THROW(gamma(3, 2), InvalidArgument);
  EXPECT_THROW(gamma(0, 2), InvalidArgument);
  EXPECT_THROW(dr_volume_bound(0), InvalidArgument);
}

TEST(Gamma, MatchesExactRationalGrid) {
  for (std::size_t d = 1; d <= 20; ++d)
    for (std::size_t m = d; m <= 200; ++m) {
      const double exact_log = std::log(exact::gamma(d, m).convert_to<double>());
      EXPECT_NEAR(gamma(d, m).log_value, exact_log, 1e-12) << d << "," << m;
    }
}

TEST(Gamma, MatchesLog1pProductAtLargeD) {
  for (std::size_t d : {50u, 200u, 1000u, 5000u}) {
    const std::size_t m = isotropic_cap(d);
    EXPECT_NEAR(gamma(d, m).log_value, oracle::log_gamma_product(d, m), 1e-9);
    EXPECT_NEAR(gamma(d, d + 3).log_value, oracle::log_gamma_product(d, d + 3), 1e-9);
  }
}

TEST(DrVolumeBound, Values) {
  EXPECT_NEAR(dr_volume_bound(1).value(), 1.0, 1e-15);
  EXPECT_NEAR(dr_volume_bound(2).value(), 0.5, 1e-15);
  EXPECT_NEAR(dr_volume_bound(3).value(), 6.0 / 27.0, 1e-15);
  for (std::size_t d = 1; d <= 15; ++d)
    EXPECT_NEAR(dr_volume_bound(d).value(), exact::dr_volume_bound(d).convert_to<double>(), 1e-14);
}

TEST(P1Exact, Examples) {
  EXPECT_NEAR(p1_exact(Vector{1.0 / 3, 1.0 / 3, 1.0 / 3}, 2), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p1_exact(Vector{0.2, 0.3, 0.5}, 1), 1.0, 1e-15);
  EXPECT_NEAR(p1_exact(Vector(4, 0.25), 2), 0.75, 1e-15);
  EXPECT_EQ(p1_exact(Vector{0.5, 0.5}, 3), 0.0);
}

TEST(P1Exact, Errors) {
  EXPECT_THROW(p1_exact(Vector{-0.1, 1.1}, 1), InvalidArgument);
  EXPECT_THROW(p1_exact(Vector{0.5, 0.4}, 1), InvalidArgument);
  EXPECT_THROW(p1_exact(Vector{}, 1), InvalidArgument);
}

TEST(P1Exact, AgreesWithTupleEnumeration) {
  std::mt19937_64 rng(21);
  std::exponential_distribution<double> ex;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t m = 1 + rep % 7, d = 1 + rep % 4;
    Vector p(m);
    double s = 0.0;
    for (double& x : p) s += (x = ex(rng));
    for (double& x : p) x /= s;
    EXPECT_NEAR(p1_exact(p, d), oracle::tuple_p1(p, d), 1e-13);
  }
}

TEST(P1Exact, UniformMaximizes) {
  std::mt19937_64 rng(22);
  std::exponential_distribution<double> ex;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t m = 2 + rep % 30, d = 1 + rep % std::min<std::size_t>(m, 8);
    Vector p(m);
    double s = 0.0;
    for (double& x : p) s += (x = ex(rng));
    for (double& x : p) x /= s;
    EXPECT_LE(p1_exact(p, d), p1_uniform(d, m).value() * (1 + 1e-12));
  }
  for (std::size_t m = 1; m <= 30; ++m)
    for (std::size_t d = 1; d <= m; ++d)
      EXPECT_NEAR(p1_exact(Vector(m, 1.0 / static_cast<double>(m)), d), p1_uniform(d, m).value(), 1e-12);
}

TEST(Gamma, DecreasingInM) {
  for (std::size_t d = 1; d <= 50; ++d)
    for (std::size_t m = d; m < isotropic_cap(d); ++m)
      EXPECT_LE(gamma(d, m + 1).log_value, gamma(d, m).log_value + 1e-13) << d << "," << m;
}

TEST(Gamma, CapIncreasingBoundedByE) {
  double prev = gamma(2, 3).log_value;
  for (std::size_t d = 3; d <= 1000; ++d) {
    const double cur = gamma(d, isotropic_cap(d)).log_value;
    EXPECT_GT(cur, prev) << d;
    EXPECT_LT(cur, 1.0) << d;
    prev = cur;
  }
  // e - gamma(1000, 500500), computed at 50 digits with mpmath.
  EXPECT_NEAR(std::numbers::e - gamma(1000, isotropic_cap(1000)).value(), 0.0036210562499116028, 1e-8);
}

// gamma * dr bound = dr bound / (uniform P1 over m_bar).
TEST(Gamma, ProofChainConsistency) {
  for (std::size_t d = 1; d <= 30; ++d)
    for (std::size_t m = d; m <= 3 * isotropic_cap(d); m += 1 + m / 7) {
      const std::size_t mb = capped_m(d, m);
      const double lhs = (gamma(d, m) * dr_volume_bound(d)).log_value;
      const double rhs = (dr_volume_bound(d) / p1_uniform(d, mb)).log_value;
      EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(GammaAsymptotic, AdditiveSmallD) {
  const double expected = std::exp(1.0) / std::sqrt(2.0 * std::numbers::pi) * std::exp(2.0) / std::pow(3.0, 1.5);
  EXPECT_NEAR(gamma_asymptotic(2, AdditiveRegime{1}).value(), expected, 1e-14);
  EXPECT_NEAR(expected, 1.5420967768781840, 1e-15);
}

TEST(GammaAsymptotic, RatiosApproachOne) {
  double prev = INFINITY;
  for (std::size_t d : {50u, 100u, 200u}) {
    const AsymptoticRegime r = LinearRegime{2.0};
    const double lr = gamma(d, regime_m(d, r)).log_value - gamma_asymptotic(d, r).log_value;
    EXPECT_LT(std::abs(lr), prev);
    prev = std::abs(lr);
  }
  EXPECT_LT(prev, 1e-3);
  prev = INFINITY;
  for (std::size_t d : {100u, 250u, 500u}) {
    const AsymptoticRegime r = AdditiveRegime{1};
    const double lr = gamma(d, regime_m(d, r)).log_value - gamma_asymptotic(d, r).log_value;
    EXPECT_LT(std::abs(lr), prev);
    prev = std::abs(lr);
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(GammaAsymptotic, RegimeValidation) {
  EXPECT_THROW(gamma_asymptotic(10, LinearRegime{1.0}), InvalidArgument);
  EXPECT_THROW(gamma_asymptotic(10, LinearRegime{1.05}), InvalidArgument);
  EXPECT_NO_THROW(gamma_asymptotic(10, LinearRegime{1.1}));
  EXPECT_THROW(gamma_asymptotic(10, AdditiveRegime{0}), InvalidArgument);
  EXPECT_EQ(regime_m(10, LinearRegime{1.5}), 15u);
  EXPECT_EQ(regime_m(7, LinearRegime{1.5}), 11u);
}
