#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "riesz/mollify.hpp"

using namespace riesz;

namespace {

double at(const Mollifier& m, double x) {
  const double a[1] = {x};
  return m(a);
}

double at(const Mollifier& m, double x, double y) {
  const double a[2] = {x, y};
  return m(a);
}

double tf(const Mollifier& m, double u) {
  const double a[1] = {u};
  return m.transform(a);
}

double kc(const RieszParams& p, const Mollifier& psi, double x) {
  const double a[1] = {x};
  return kernel_convolve(p, psi, a);
}

}  // namespace

TEST(Bump, UnitMassSymmetricSupportedInHalfBall) {
  const Mollifier f = bump_profile(1);
  EXPECT_NEAR(f.mass(), 1.0, 1e-10);
  // mass by independent adaptive quadrature of the interpolated profile
  EXPECT_NEAR(oracle::integrate([&](double x) { return at(f, x); }, -0.5, 0.5, 1e-12), 1.0, 1e-8);
  EXPECT_EQ(at(f, 0.5 + 1e-6), 0.0);
  EXPECT_EQ(at(f, -0.5 - 1e-6), 0.0);
  EXPECT_LE(f.support_radius(), 0.5);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int i = 0; i < 500; ++i) {
    const double x = U(rng);
    EXPECT_GE(at(f, x), 0.0);
    EXPECT_NEAR(at(f, x), at(f, -x), 1e-12);
  }
}

TEST(Bump, TransformNonnegative) {
  const Mollifier f = bump_profile(1);
  const double top = std::numbers::pi / f.axis_profile().spacing();
  double lo = 1.0;
  for (int k = 0; k <= 20000; ++k) lo = std::min(lo, tf(f, top * k / 20000.0));
  EXPECT_GE(lo, -1e-12);
}

TEST(Bump, TwoDimensionalProfile) {
  const Mollifier f = bump_profile(2);
  EXPECT_NEAR(f.mass(), 1.0, 1e-10);
  EXPECT_LE(f.support_radius(), 0.5 + 1e-15);
  for (int k = 0; k < 64; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 64.0;
    EXPECT_EQ(at(f, (0.5 + 1e-6) * std::cos(th), (0.5 + 1e-6) * std::sin(th)), 0.0);
  }
  const double u[2] = {13.0, -4.0};
  const double u0[2] = {13.0, 0.0};
  const double u1[2] = {0.0, -4.0};
  EXPECT_NEAR(f.transform(u), f.transform(u0) * f.transform(u1), 1e-14);
  EXPECT_THROW(bump_profile(3), DomainError);
}

TEST(Scale, IdentityMassAndSup) {
  const Mollifier f = bump_profile(1);
  const Mollifier f1 = scale(f, 1.0);
  for (double x : {-0.3, 0.0, 0.11, 0.4}) EXPECT_EQ(at(f1, x), at(f, x));
  for (double eps : {1.0, 0.1, 0.001}) {
    const Mollifier p = scale(f, eps);
    EXPECT_NEAR(p.mass(), 1.0, 1e-10);
    EXPECT_NEAR(p.sup(), f.sup() / eps, 1e-12 * f.sup() / eps);
    EXPECT_LE(p.support_radius(), eps / 2.0 * (1 + 1e-12));
    EXPECT_NEAR(at(p, 0.1 * eps), at(f, 0.1) / eps, 1e-9 / eps);
  }
  const Mollifier f2 = bump_profile(2);
  EXPECT_NEAR(scale(f2, 0.1).sup(), f2.sup() * 100.0, 1e-10 * f2.sup() * 100.0);
  EXPECT_THROW(scale(f, 0.0), DomainError);
}

TEST(SelfConvolve, MassSupportTransform) {
  for (double eps : {0.2, 0.05}) {
    const Mollifier phi = scale(bump_profile(1), eps);
    const Mollifier psi = self_convolve(phi);
    EXPECT_NEAR(psi.mass(), 1.0, 1e-9);
    EXPECT_EQ(at(psi, eps), 0.0);
    EXPECT_EQ(at(psi, -eps * 1.0001), 0.0);
    EXPECT_NEAR(at(psi, 0.3 * eps), at(psi, -0.3 * eps), 1e-9 * psi.sup());
    double dev = 0.0;
    const double top = 0.5 * std::numbers::pi / (phi.axis_profile().spacing() * eps);
    for (int k = 0; k <= 4000; ++k) {
      const double u = top * k / 4000.0;
      dev = std::max(dev, std::abs(tf(psi, u) - tf(phi, u) * tf(phi, u)));
      EXPECT_GE(tf(psi, u), -1e-12);
    }
    EXPECT_LE(dev, 1e-8);
  }
  // psi(x) against the continuous convolution of phi with itself
  const Mollifier phi = scale(bump_profile(1), 1.0);
  const Mollifier psi = self_convolve(phi);
  for (double x : {0.0, 0.2, 0.55, 0.9}) {
    const double ref = oracle::integrate([&](double y) { return at(phi, y) * at(phi, x - y); }, -0.5, 0.5, 1e-12);
    EXPECT_NEAR(at(psi, x), ref, 1e-6);
  }
  EXPECT_THROW(self_convolve(psi), DomainError);
  EXPECT_NO_THROW(psi.factor());
  EXPECT_THROW(phi.factor(), DomainError);
}

TEST(KernelConvolve, MatchesOracle1D) {
  const auto p = RieszParams::make(0.5, 1);
  const double eps = 0.1;
  const Mollifier psi = self_convolve(scale(bump_profile(1), eps));
  auto density = [&](double y) { return at(psi, y); };
  for (double x : {0.0, 0.013, 0.05, 0.099, 0.15, 1.0}) {
    const double ref = oracle::kernel_convolve_1d(density, x, 0.5, -eps, eps, {0.0});
    EXPECT_NEAR(kc(p, psi, x), ref, 1e-7 * ref) << "x=" << x;
  }
}

TEST(KernelConvolve, MatchesOracle2D) {
  const auto p = RieszParams::make(1.2, 2);
  const double eps = 0.2;
  const Mollifier psi = self_convolve(scale(bump_profile(2), eps));
  const double w = psi.axis_half_width();
  for (auto [x0, x1] : {std::pair{0.0, 0.0}, std::pair{0.03, -0.05}, std::pair{0.5, 0.2}}) {
    // polar coordinates around x: r^(1 - alpha) is integrable at r = 0
    const double R = std::hypot(std::abs(x0) + w, std::abs(x1) + w);
    auto ray = [&](double th) {
      auto g = [&](double r) { return std::pow(r, 1.0 - p.alpha) * at(psi, x0 + r * std::cos(th), x1 + r * std::sin(th)); };
      return oracle::integrate(g, 0.0, R, 1e-8);
    };
    const double ref = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(ray, 0.0, 2.0 * std::numbers::pi, 5, 1e-7);
    const double x[2] = {x0, x1};
    EXPECT_NEAR(kernel_convolve(p, psi, x), ref, 1e-4 * ref) << x0 << "," << x1;
  }
}

TEST(KernelConvolve, CorrectedConstantBeyondTwoEps) {
  const auto p = RieszParams::make(0.5, 1);
  const double eps = 0.01;
  const Mollifier psi = self_convolve(scale(bump_profile(1), eps));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(2.0 * eps * (1 + 1e-9), 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double z = U(rng) * (i % 2 ? 1.0 : -1.0);
    worst = std::max(worst, kc(p, psi, z) / p.kernel(std::abs(z)));
  }
  EXPECT_LE(worst, std::pow(2.0, p.alpha));
}

TEST(KernelConvolve, ConvergesAtFixedPoint) {
  const auto p = RieszParams::make(0.5, 1);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.01, 0.001}) {
    const double gap = std::abs(kc(p, self_convolve(scale(bump_profile(1), eps)), 1.0) - 1.0);
    EXPECT_LT(gap, prev);
    prev = gap;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(KernelConvolve, FiniteAtOriginWithinBound) {
  for (int n : {1, 2}) {
    const auto p = RieszParams::make(0.7 * n, n);
    const Mollifier psi = self_convolve(scale(bump_profile(n), 0.05));
    const double z[2] = {0.0, 0.0};
    const double v = kernel_convolve(p, psi, std::span(z, static_cast<std::size_t>(n)));
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, psi.sup() * ball_kernel_integral(p, 3.0 * 0.05));
  }
}

TEST(MollifyMeasure, DiracGivesProfile) {
  const double o[1] = {0.0};
  const double eps = 0.1;
  const Mollifier phi = scale(bump_profile(1), eps);
  const auto g = mollify_measure(AtomicMeasure::dirac(o), phi);
  EXPECT_NEAR(g.mass(), 1.0, 1e-12);
  EXPECT_NEAR(g.spacing(), eps / 16.0, 1e-15);
  double worst = 0.0;
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    worst = std::max(worst, std::abs(g.weights()[k] / g.spacing() - at(phi, g.cell_center(k, 0))));
  }
  EXPECT_LE(worst, 0.01 * phi.sup());
  EXPECT_GE(g.origin()[0], -eps / 2.0 - g.spacing());
}

TEST(MollifyMeasure, MassConservedCantor) {
  const Measure c = cantor_measure(5, 1.0 / 3.0, Representation::atomic);
  const auto g = mollify_measure(c, scale(bump_profile(1), 0.01));
  EXPECT_NEAR(g.mass(), 1.0, 1e-9);
  const Measure cg = cantor_measure(5, 1.0 / 3.0, Representation::grid);
  EXPECT_NEAR(mollify_measure(cg, scale(bump_profile(1), 0.01)).mass(), 1.0, 1e-9);
  const double o[2] = {0.2, 0.1};
  EXPECT_NEAR(mollify_measure(AtomicMeasure::dirac(o, 2.0), scale(bump_profile(2), 0.05)).mass(), 2.0, 1e-9);
}

TEST(MollifyMeasure, SupportWithinHalfEpsilon) {
  const Measure c = cantor_measure(3, 1.0 / 3.0, Representation::grid);
  const double eps = 0.04;
  const auto g = mollify_measure(c, scale(bump_profile(1), eps));
  for (auto k : g.nonzero()) {
    const double lo = g.cell_lower(k, 0);
    EXPECT_GE(lo + g.spacing(), -eps / 2.0);
    EXPECT_LE(lo, 1.0 + eps / 2.0);
  }
}

TEST(MollifyMeasure, WeakConvergenceAndLipschitzBound) {
  const Measure c = cantor_measure(5, 1.0 / 3.0, Representation::atomic);
  const auto& a = std::get<AtomicMeasure>(c);
  const double L = 3.0;  // Lipschitz constant of cos(3x)
  double exact = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) exact += a.weight(i) * std::cos(L * a.point(i)[0]);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto g = mollify_measure(c, scale(bump_profile(1), eps));
    double v = 0.0;
    for (auto k : g.nonzero()) {
      const double lo = g.cell_lower(k, 0);
      // exact integral of cos(3x) against the cell's uniform density
      v += g.weights()[k] * (std::sin(L * (lo + g.spacing())) - std::sin(L * lo)) / (L * g.spacing());
    }
    const double gap = std::abs(v - exact);
    EXPECT_LT(gap, prev);
    EXPECT_LE(gap, L * eps * mass(c));
    prev = gap;
  }
}

TEST(MollifyMeasure, RejectsCoarseSpacing) {
  const Measure u = GridMeasure::uniform_lattice(4);
  EXPECT_THROW(mollify_measure(u, scale(bump_profile(1), 0.1), 0.1 / 4.0), ResolutionError);
  EXPECT_NO_THROW(mollify_measure(u, scale(bump_profile(1), 0.1), 0.1 / 8.0));
}
