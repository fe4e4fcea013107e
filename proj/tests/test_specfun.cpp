#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "riesz/specfun.hpp"

using namespace riesz;

TEST(Gamma, HalfIntegerAndFactorial) {
  EXPECT_NEAR(riesz::gamma(0.5), 1.7724538509055159, 1e-15);
  EXPECT_NEAR(riesz::gamma(5.0), 24.0, 24.0 * 1e-14);
}

TEST(Gamma, QuarterMatchesIntegral) {
  const double ref = oracle::gamma_integral(0.25);
  EXPECT_NEAR(ref, 3.6256099082, 1e-9);
  EXPECT_NEAR(riesz::gamma(0.25), ref, 1e-12 * ref);
}

TEST(Gamma, MatchesIntegralAtTwentyPoints) {
  for (int i = 0; i < 20; ++i) {
    const double x = 0.15 + 0.6 * i;
    const double ref = oracle::gamma_integral(x);
    EXPECT_NEAR(riesz::gamma(x), ref, 1e-12 * ref) << "x=" << x;
  }
}

TEST(Gamma, RecurrenceRandom) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.1, 20.0);
  for (int i = 0; i < 200; ++i) {
    const double x = U(rng);
    const double lhs = riesz::gamma(x + 1.0);
    const double rhs = x * riesz::gamma(x);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(rhs)) << "x=" << x;
  }
}

TEST(Gamma, RejectsNonPositive) {
  EXPECT_THROW(riesz::gamma(0.0), DomainError);
  EXPECT_THROW(riesz::gamma(-1.5), DomainError);
}

TEST(RieszParams, Validation) {
  EXPECT_THROW(RieszParams::make(1.5, 1), DomainError);
  EXPECT_THROW(RieszParams::make(0.0, 1), DomainError);
  EXPECT_THROW(RieszParams::make(0.5, 0), DomainError);
  EXPECT_NO_THROW(RieszParams::make(1.5, 2));
  try {
    RieszParams::make(1.5, 1);
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("0 < alpha < n"), std::string::npos);
  }
}

TEST(RieszConstant, Examples) {
  EXPECT_NEAR(riesz_constant(RieszParams::make(0.5, 1)), std::sqrt(2.0 * std::numbers::pi), 1e-12);
  EXPECT_NEAR(riesz_constant(RieszParams::make(1.0, 2)), 2.0 * std::numbers::pi, 1e-12);
  const double c = riesz_constant(RieszParams::make(0.9, 1));
  EXPECT_NEAR(c, oracle::pairing_constant(0.9, 1), 1e-6 * c);
}

TEST(RieszConstant, GaussianPairingRandom) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  for (int i = 0; i < 10; ++i) {
    const int n = 1 + i % 2;
    const double alpha = U(rng) * n;
    const double s = 0.5 + U(rng);
    const double c = riesz_constant(RieszParams::make(alpha, n));
    const double ref = oracle::pairing_constant(alpha, n, s);
    EXPECT_NEAR(c, ref, 1e-6 * ref) << "alpha=" << alpha << " n=" << n;
  }
}

TEST(RieszConstant, AlternativeFormFailsPairing) {
  const auto p = RieszParams::make(0.5, 1);
  const double ref = oracle::pairing_constant(0.5, 1);
  EXPECT_GT(std::abs(riesz_constant_alternative(p) - ref), 0.1 * ref);
}

TEST(GaussianFt, Examples) {
  const double zero1[1] = {0.0};
  const double zero2[2] = {0.0, 0.0};
  EXPECT_NEAR(gaussian_ft(0.5, zero1), std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(gaussian_ft(2.0, zero2), std::numbers::pi / 2.0, 1e-15);
  const double one[1] = {1.0};
  const double expect = 2.0 * std::sqrt(std::numbers::pi) * std::exp(-1.0);
  EXPECT_NEAR(gaussian_ft(0.25, one), expect, 1e-14);
  EXPECT_NEAR(gaussian_ft(0.25, one), oracle::gaussian_ft_1d(0.25, 1.0), 1e-10);
  EXPECT_THROW(gaussian_ft(0.0, one), DomainError);
}

TEST(GaussianFt, Separable) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    const double u[2] = {U(rng), U(rng)};
    const double s = 0.3 + 0.1 * i;
    const double prod = gaussian_ft(s, std::span(u, 1)) * gaussian_ft(s, std::span(u + 1, 1));
    EXPECT_NEAR(gaussian_ft(s, u), prod, 1e-14 * std::max(1.0, prod));
  }
}

TEST(Geometry, SphereBallAndKernelIntegral) {
  EXPECT_NEAR(unit_sphere_area(1), 2.0, 1e-15);
  EXPECT_NEAR(unit_sphere_area(2), 2.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(2), std::numbers::pi, 1e-14);
  const auto p = RieszParams::make(0.5, 1);
  // int_{-R}^{R} |t|^-1/2 dt = 4 sqrt(R)
  EXPECT_NEAR(ball_kernel_integral(p, 0.09), 4.0 * 0.3, 1e-14);
}
