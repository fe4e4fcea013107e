#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

#include "riesz/error.hpp"

namespace riesz {

/// Exponent and ambient dimension of the Riesz kernel k(x) = |x|^-alpha on R^n.
///
/// Construct through make(), which enforces 0 < alpha < n. The case alpha = 0
/// is rejected on purpose: the kernel is then identically 1 and every energy
/// reduces to the squared mass.
struct RieszParams {
  double alpha = 0.5;
  int n = 1;

  static RieszParams make(double alpha, int n) {
    if (n < 1) {
      throw DomainError("ambient dimension n must be >= 1");
    }
    if (!(alpha > 0.0 && alpha < static_cast<double>(n))) {
      std::ostringstream msg;
      msg << "Riesz exponent must satisfy 0 < alpha < n (got alpha=" << alpha << ", n=" << n << ")";
      throw DomainError(msg.str());
    }
    return RieszParams{alpha, n};
  }

  /// k evaluated at distance r >= 0 (infinite at r = 0).
  double kernel(double r) const { return r > 0.0 ? std::pow(r, -alpha) : INFINITY; }
};

namespace detail {
// Lanczos approximation, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
}  // namespace detail

/// Gamma function for positive real arguments.
///
/// Lanczos approximation with the reflection formula below 1/2; relative
/// error stays around 1e-15 on (0, 30].
inline double gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("gamma: argument must be a finite positive real");
  }
  using std::numbers::pi;
  if (x < 0.5) {
    return pi / (std::sin(pi * x) * gamma(1.0 - x));
  }
  const double z = x - 1.0;
  double a = detail::kLanczosCoeff[0];
  for (std::size_t i = 1; i < detail::kLanczosCoeff.size(); ++i) {
    a += detail::kLanczosCoeff[i] / (z + static_cast<double>(i));
  }
  const double t = z + detail::kLanczosG + 0.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

/// Constant c(alpha, n) in k^(u) = c(alpha, n) |u|^(alpha - n), with the
/// transform convention f^(u) = int e^{iux} f(x) dx:
///
///   c(alpha, n) = pi^(n/2) 2^(n - alpha) Gamma((n - alpha)/2) / Gamma(alpha/2).
///
/// This is the constant obtained by the Gaussian subordination argument
/// (write |x|^-alpha as a Gamma-weighted superposition of Gaussians and
/// transform term by term). It is checked in the tests against a direct
/// quadrature of the pairing <k, phi^> = <k^, phi>.
inline double riesz_constant(const RieszParams& p) {
  using std::numbers::pi;
  const double n = static_cast<double>(p.n);
  return std::pow(pi, n / 2.0) * std::pow(2.0, n - p.alpha) * gamma((n - p.alpha) / 2.0) /
         gamma(p.alpha / 2.0);
}

/// The alternative closed form pi^(n/2) 2^(alpha + n) Gamma((alpha + n)/2) /
/// Gamma(alpha/2) that appears in some statements of the kernel transform.
/// It does not satisfy the pairing identity; kept so the audit can show that.
inline double riesz_constant_alternative(const RieszParams& p) {
  using std::numbers::pi;
  const double n = static_cast<double>(p.n);
  return std::pow(pi, n / 2.0) * std::pow(2.0, p.alpha + n) * gamma((p.alpha + n) / 2.0) /
         gamma(p.alpha / 2.0);
}

/// Fourier transform of exp(-s|x|^2) on R^n: (pi/s)^(n/2) exp(-|u|^2 / 4s).
inline double gaussian_ft(double s, std::span<const double> u) {
  if (!(s > 0.0)) {
    throw DomainError("gaussian_ft: width parameter s must be positive");
  }
  double r2 = 0.0;
  for (double c : u) {
    r2 += c * c;
  }
  const double n = static_cast<double>(u.size());
  return std::pow(std::numbers::pi / s, n / 2.0) * std::exp(-r2 / (4.0 * s));
}

/// Surface area of the unit sphere S^(n-1); 2 for n = 1 (two points).
inline double unit_sphere_area(int n) {
  const double h = static_cast<double>(n) / 2.0;
  return 2.0 * std::pow(std::numbers::pi, h) / gamma(h);
}

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  const double h = static_cast<double>(n) / 2.0;
  return std::pow(std::numbers::pi, h) / gamma(h + 1.0);
}

/// int_{B(R)} |t|^-alpha dt in R^n.
inline double ball_kernel_integral(const RieszParams& p, double radius) {
  const double n = static_cast<double>(p.n);
  return unit_sphere_area(p.n) * std::pow(radius, n - p.alpha) / (n - p.alpha);
}

}  // namespace riesz
