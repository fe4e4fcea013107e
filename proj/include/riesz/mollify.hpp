#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/measure.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/specfun.hpp"

namespace riesz {

/// Symmetric one-dimensional profile stored as samples on the lattice
/// x_j = (j - half) * spacing, j = 0..2*half, and extended by linear
/// interpolation (zero outside). Integrals and transforms use the composite
/// rule on the lattice, so the transform of a lattice convolution is exactly
/// the product of transforms.
class LatticeProfile {
public:
  LatticeProfile(double spacing, std::vector<double> samples)
      : spacing_(spacing), samples_(std::move(samples)) {
    if (samples_.size() % 2 == 0) throw DomainError("lattice profile needs an odd sample count");
    half_ = samples_.size() / 2;
    build_cumulative();
  }

  double spacing() const { return spacing_; }
  std::size_t half() const { return half_; }
  const std::vector<double>& samples() const { return samples_; }
  double knot(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(half_)) * spacing_; }
  double support_radius() const { return static_cast<double>(half_) * spacing_; }

  double value(double x) const {
    const double s = x / spacing_ + static_cast<double>(half_);
    if (s <= 0.0 || s >= static_cast<double>(samples_.size() - 1)) return 0.0;
    const auto j = static_cast<std::size_t>(s);
    const double f = s - static_cast<double>(j);
    return samples_[j] + f * (samples_[j + 1] - samples_[j]);
  }

  /// spacing * sum_j samples_j cos(v x_j)
  double transform(double v) const {
    const double step = v * spacing_;
    double acc = 0.0;
    // rotating phasor, re-anchored every 64 steps
    Complex z = std::polar(1.0, step);
    Complex c{1.0, 0.0};
    for (std::size_t j = 1; j <= half_; ++j) {
      if (j % 64 == 0) {
        c = std::polar(1.0, step * static_cast<double>(j));
      } else {
        c *= z;
      }
      acc += samples_[half_ + j] * c.real();
    }
    return spacing_ * (samples_[half_] + 2.0 * acc);
  }

  double mass() const { return cumulative_.back(); }
  double sup() const { return *std::max_element(samples_.begin(), samples_.end()); }

  /// int_{-inf}^x profile
  double cdf(double x) const {
    const double s = x / spacing_ + static_cast<double>(half_);
    if (s <= 0.0) return 0.0;
    const std::size_t last = samples_.size() - 1;
    if (s >= static_cast<double>(last)) return cumulative_[last];
    const auto j = static_cast<std::size_t>(s);
    const double tau = x - knot(j);
    return cumulative_[j] + samples_[j] * tau + (samples_[j + 1] - samples_[j]) * tau * tau / (2.0 * spacing_);
  }

  /// int_{-inf}^x cdf
  double cdf2(double x) const {
    const double s = x / spacing_ + static_cast<double>(half_);
    if (s <= 0.0) return 0.0;
    const std::size_t last = samples_.size() - 1;
    if (s >= static_cast<double>(last)) return second_[last] + cumulative_[last] * (x - knot(last));
    const auto j = static_cast<std::size_t>(s);
    const double tau = x - knot(j);
    return second_[j] + cumulative_[j] * tau + samples_[j] * tau * tau / 2.0 +
           (samples_[j + 1] - samples_[j]) * tau * tau * tau / (6.0 * spacing_);
  }

  /// Lattice convolution (spacing * sum_k a_k b_{j-k}) of two profiles with
  /// the same spacing.
  static LatticeProfile convolve(const LatticeProfile& a, const LatticeProfile& b) {
    if (a.spacing_ != b.spacing_) throw DomainError("lattice convolution needs equal spacings");
    std::vector<double> out(a.samples_.size() + b.samples_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.samples_.size(); ++i) {
      const double ai = a.samples_[i] * a.spacing_;
      if (ai == 0.0) continue;
      for (std::size_t k = 0; k < b.samples_.size(); ++k) out[i + k] += ai * b.samples_[k];
    }
    return LatticeProfile(a.spacing_, std::move(out));
  }

private:
  void build_cumulative() {
    const std::size_t n = samples_.size();
    cumulative_.assign(n, 0.0);
    second_.assign(n, 0.0);
    const double h = spacing_;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double a = samples_[j];
      const double b = samples_[j + 1];
      cumulative_[j + 1] = cumulative_[j] + 0.5 * h * (a + b);
      second_[j + 1] = second_[j] + cumulative_[j] * h + a * h * h / 2.0 + (b - a) * h * h / 6.0;
    }
  }

  double spacing_;
  std::size_t half_ = 0;
  std::vector<double> samples_;
  std::vector<double> cumulative_;
  std::vector<double> second_;
};

/// A member of the approximate identity built from the bump profile f:
///   phi_eps(x) = eps^-n f(x / eps)          (order 1)
///   psi_eps    = phi_eps * phi_eps           (order 2, from self_convolve)
///
/// n = 1: f = (g * g) / |g * g|_1 with g(x) = exp(-1 / (1 - (4x)^2)) on |x| < 1/4,
///        so supp f = [-1/2, 1/2], f even, f^ = (g^)^2 / |g*g|_1 >= 0.
/// n = 2: f(x) = 2 f1(sqrt2 x1) f1(sqrt2 x2), the tensor product of the 1D
///        profile compressed so that its square support fits in B(1/2).
class Mollifier {
public:
  int dim() const { return dim_; }
  double eps() const { return eps_; }
  int order() const { return order_; }
  /// Compression applied per axis (1 for n = 1, sqrt(2) for n = 2).
  double axis_scale() const { return axis_scale_; }
  const LatticeProfile& axis_profile() const { return *profile_; }
  /// The single-convolution profile this one was built from (order 2 only).
  const LatticeProfile* factor_profile() const { return factor_.get(); }
  /// phi_eps for psi_eps = phi_eps * phi_eps.
  Mollifier factor() const {
    if (order_ != 2) throw DomainError("Mollifier::factor: only defined for self-convolved mollifiers");
    Mollifier m = *this;
    m.order_ = 1;
    m.profile_ = factor_;
    m.factor_.reset();
    return m;
  }

  /// Radius of a ball centred at 0 that contains the support.
  double support_radius() const {
    return eps_ * profile_->support_radius() / axis_scale_ * std::sqrt(static_cast<double>(dim_));
  }
  /// Half-width of the support along each axis.
  double axis_half_width() const { return eps_ * profile_->support_radius() / axis_scale_; }

  /// Density of the axis factor: (s / eps) P(s x / eps).
  double axis_value(double x) const {
    return axis_scale_ / eps_ * profile_->value(axis_scale_ * x / eps_);
  }

  double operator()(std::span<const double> x) const {
    double v = 1.0;
    for (int d = 0; d < dim_; ++d) v *= axis_value(x[d]);
    return v;
  }

  /// Transform int e^{iu.x} phi(x) dx under the lattice rule.
  double transform(std::span<const double> u) const {
    double v = 1.0;
    for (int d = 0; d < dim_; ++d) v *= profile_->transform(eps_ * u[d] / axis_scale_);
    return v;
  }

  double mass() const { return std::pow(profile_->mass(), dim_); }
  double sup() const { return std::pow(axis_scale_ / eps_ * profile_->sup(), dim_); }

  /// Axis CDF and its antiderivative, in physical units.
  double axis_cdf(double x) const { return profile_->cdf(axis_scale_ * x / eps_); }
  double axis_cdf2(double x) const { return eps_ / axis_scale_ * profile_->cdf2(axis_scale_ * x / eps_); }

private:
  friend Mollifier bump_profile(int n);
  friend Mollifier scale(const Mollifier& base, double eps);
  friend Mollifier self_convolve(const Mollifier& phi);

  int dim_ = 1;
  double eps_ = 1.0;
  double axis_scale_ = 1.0;
  int order_ = 1;
  std::shared_ptr<const LatticeProfile> profile_;
  std::shared_ptr<const LatticeProfile> factor_;
};

/// Lattice resolution of the base profile: 2^-12 of its unit-length support.
inline constexpr int kProfileLog2Resolution = 12;

/// The base bump f at scale eps = 1 (see Mollifier).
inline Mollifier bump_profile(int n) {
  if (n != 1 && n != 2) throw DomainError("bump_profile: dimension must be 1 or 2");
  static const std::shared_ptr<const LatticeProfile> base = [] {
    const double h = std::ldexp(1.0, -kProfileLog2Resolution);
    const std::size_t gh = std::size_t{1} << (kProfileLog2Resolution - 2);  // g vanishes at |x| = 1/4
    std::vector<double> g(2 * gh + 1, 0.0);
    for (std::size_t j = 1; j < 2 * gh; ++j) {
      const double x = 4.0 * (static_cast<double>(j) - static_cast<double>(gh)) * h;
      g[j] = std::exp(-1.0 / (1.0 - x * x));
    }
    const LatticeProfile gp(h, std::move(g));
    const LatticeProfile ff = LatticeProfile::convolve(gp, gp);
    std::vector<double> f = ff.samples();
    const double z = ff.mass();
    for (double& v : f) v /= z;
    return std::make_shared<const LatticeProfile>(h, std::move(f));
  }();
  Mollifier m;
  m.dim_ = n;
  m.eps_ = 1.0;
  m.axis_scale_ = n == 1 ? 1.0 : std::numbers::sqrt2;
  m.order_ = 1;
  m.profile_ = base;
  return m;
}

/// phi_eps(x) = eps^-n f(x / eps).
inline Mollifier scale(const Mollifier& base, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("scale: eps must be positive");
  Mollifier m = base;
  m.eps_ = base.eps_ * eps;
  return m;
}

/// psi_eps = phi_eps * phi_eps (support doubles, transform squares).
inline Mollifier self_convolve(const Mollifier& phi) {
  if (phi.order_ != 1) throw DomainError("self_convolve: expects a single (order-1) mollifier");
  Mollifier m = phi;
  m.order_ = 2;
  m.factor_ = phi.profile_;
  m.profile_ = std::make_shared<const LatticeProfile>(LatticeProfile::convolve(*phi.profile_, *phi.profile_));
  return m;
}

namespace detail {

// Exact integral of |t|^-alpha (a + b t) over [t0, t1] (alpha < 1).
inline double linear_times_power(double t0, double t1, double a, double b, double alpha) {
  auto f0 = [alpha](double t) { return std::copysign(std::pow(std::abs(t), 1.0 - alpha), t) / (1.0 - alpha); };
  auto f1 = [alpha](double t) { return std::pow(std::abs(t), 2.0 - alpha) / (2.0 - alpha); };
  return a * (f0(t1) - f0(t0)) + b * (f1(t1) - f1(t0));
}

inline double kernel_convolve_1d(const RieszParams& p, const Mollifier& psi, double x) {
  const LatticeProfile& prof = psi.axis_profile();
  const double scale = psi.eps();  // axis_scale is 1 in 1D
  const double step = prof.spacing() * scale;
  const double half_step = 0.5 * step;
  const auto& v = prof.samples();
  const double inv = 1.0 / scale;
  const GaussRule& g2 = gauss_legendre(2);
  const GaussRule& g4 = gauss_legendre(4);
  const double alpha = p.alpha;
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    const double a = v[j] * inv;
    const double b = v[j + 1] * inv;
    if (a == 0.0 && b == 0.0) continue;
    const double u0 = prof.knot(j) * scale;
    const double t0 = u0 - x;  // t = u - x, |x - u| = |t|
    const double t1 = t0 + step;
    const double tm = t0 + half_step;
    const double slope = (b - a) / step;
    if (std::abs(tm) > 32.0 * half_step) {
      total += g2.integrate(t0, t1, [&](double t) { return std::pow(std::abs(t), -alpha) * (a + slope * (t - t0)); });
    } else if (std::abs(tm) > 4.0 * half_step) {
      total += g4.integrate(t0, t1, [&](double t) { return std::pow(std::abs(t), -alpha) * (a + slope * (t - t0)); });
    } else {
      total += linear_times_power(t0, t1, a - slope * t0, slope, alpha);
    }
  }
  return total;
}

inline double kernel_convolve_2d(const RieszParams& p, const Mollifier& psi, std::span<const double> x) {
  const double w = psi.axis_half_width();
  const double alpha = p.alpha;
  // distance from x to the support square and to its farthest corner
  const double dx = std::max(0.0, std::abs(x[0]) - w);
  const double dy = std::max(0.0, std::abs(x[1]) - w);
  const double r_lo = std::hypot(dx, dy);
  const double r_hi = std::hypot(std::abs(x[0]) + w, std::abs(x[1]) + w);
  // Angular sector seen from x that contains the support (full circle when
  // x lies in the square).
  double th0 = 0.0;
  double th1 = 2.0 * std::numbers::pi;
  if (r_lo > 0.0) {
    const double centre = std::atan2(-x[1], -x[0]);
    double lo = 0.0, hi = 0.0;
    for (double cx : {-w, w}) {
      for (double cy : {-w, w}) {
        double d = std::atan2(cy - x[1], cx - x[0]) - centre;
        d = std::remainder(d, 2.0 * std::numbers::pi);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    th0 = centre + lo;
    th1 = centre + hi;
  }
  constexpr std::size_t angles = 256;
  const double dth = (th1 - th0) / static_cast<double>(angles);
  auto ring = [&](double r) {
    double s = 0.0;
    for (std::size_t k = 0; k < angles; ++k) {
      const double th = th0 + dth * (static_cast<double>(k) + 0.5);
      const double y[2] = {x[0] + r * std::cos(th), x[1] + r * std::sin(th)};
      s += psi(y);
    }
    return s * dth;
  };
  const GaussRule& g8 = gauss_legendre(8);
  auto radial = [&](double r) { return std::pow(r, 1.0 - alpha) * ring(r); };
  double total = 0.0;
  const double width = w / 8.0;
  if (r_lo > 0.0) {
    for (const auto& pn : graded_panels(r_lo, r_hi, width)) total += g8.integrate(pn.lo, pn.hi, radial);
    return total;
  }
  // Geometric shells toward the singular point; the innermost disc is
  // treated as psi(x) times the exact kernel mass. The shell count keeps that
  // stub below 1e-8 of the outer scale.
  const double ratio_exp = 1.0 / (2.0 - alpha);
  double r_min = r_hi * std::pow(1e-8, ratio_exp);
  r_min = std::max(r_min, r_hi * 1e-60);
  total += psi(x) * 2.0 * std::numbers::pi * std::pow(r_min, 2.0 - alpha) / (2.0 - alpha);
  for (const auto& pn : graded_panels(r_min, r_hi, width)) total += g8.integrate(pn.lo, pn.hi, radial);
  return total;
}

}  // namespace detail

/// (k * psi)(x) = int k(x - u) psi(u) du.
///
/// 1D: product integration over the piecewise-linear profile, exact on the
/// cells adjacent to the singular point u = x and Gauss-Legendre elsewhere.
/// 2D: polar coordinates around x with geometrically graded shells toward
/// r = 0 and a midpoint rule over the angular sector covering the support.
inline double kernel_convolve(const RieszParams& p, const Mollifier& psi, std::span<const double> x) {
  if (p.n != psi.dim() || x.size() != static_cast<std::size_t>(psi.dim())) {
    throw DomainError("kernel_convolve: dimension mismatch");
  }
  if (psi.dim() == 1) return detail::kernel_convolve_1d(p, psi, x[0]);
  return detail::kernel_convolve_2d(p, psi, x);
}

/// Default output spacing of mollify_measure relative to eps.
inline constexpr double kMollifySpacingFraction = 1.0 / 16.0;

/// phi_eps * mu as a grid measure: each output cell receives the exact mass
/// of the convolution over that cell (closed-form CDFs of the profile).
///
/// spacing defaults to eps/16 and must not exceed eps/8.
inline GridMeasure mollify_measure(const Measure& m, const Mollifier& phi, std::optional<double> spacing = {}) {
  const int n = dim(m);
  if (n != phi.dim()) throw DomainError("mollify_measure: dimension mismatch");
  if (n > 2) throw UnsupportedError("mollify_measure: grid output limited to n <= 2");
  const double eps = phi.eps();
  const double s = spacing.value_or(eps * kMollifySpacingFraction);
  if (!(s > 0.0) || s > eps / 8.0 * (1.0 + 1e-12)) {
    throw ResolutionError("mollify_measure: output spacing must be positive and at most eps/8");
  }
  const double reach = phi.axis_half_width();
  const auto box = bounding_box(m);
  std::array<double, 2> origin{box[0] - reach, n == 2 ? box[2] - reach : 0.0};
  std::array<std::size_t, 2> ext{1, 1};
  for (int d = 0; d < n; ++d) {
    const double span_len = box[2 * d + 1] - box[2 * d] + 2.0 * reach;
    ext[d] = static_cast<std::size_t>(std::ceil(span_len / s)) + 1;
  }
  if (ext[0] * ext[1] > (std::size_t{1} << 24)) {
    throw ResolutionError("mollify_measure: output grid exceeds 2^24 cells");
  }
  std::vector<double> out(ext[0] * ext[1], 0.0);

  // Axis mass of a unit source over output cell c along axis d.
  // Point source at y: Phi(b - y) - Phi(a - y).
  // Uniform source on [y, y + H]: (1/H) [Phi2(b-y) - Phi2(a-y) - Phi2(b-y-H) + Phi2(a-y-H)].
  auto axis_masses = [&](int d, double y, double H, std::size_t& first, std::vector<double>& vals) {
    const double lo = y - reach;
    const double hi = y + H + reach;
    const auto c0 = static_cast<std::ptrdiff_t>(std::floor((lo - origin[d]) / s));
    const auto c1 = static_cast<std::ptrdiff_t>(std::ceil((hi - origin[d]) / s));
    const std::ptrdiff_t cmin = std::max<std::ptrdiff_t>(0, c0);
    const std::ptrdiff_t cmax = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(ext[d]) - 1, c1);
    first = static_cast<std::size_t>(cmin);
    vals.clear();
    for (std::ptrdiff_t c = cmin; c <= cmax; ++c) {
      const double a = origin[d] + s * static_cast<double>(c);
      const double b = a + s;
      double v;
      if (H == 0.0) {
        v = phi.axis_cdf(b - y) - phi.axis_cdf(a - y);
      } else {
        v = (phi.axis_cdf2(b - y) - phi.axis_cdf2(a - y) - phi.axis_cdf2(b - y - H) + phi.axis_cdf2(a - y - H)) / H;
      }
      vals.push_back(v);
    }
  };

  std::size_t f0 = 0, f1 = 0;
  std::vector<double> m0, m1;
  auto deposit = [&](double w, std::array<double, 2> y, double H) {
    axis_masses(0, y[0], H, f0, m0);
    if (n == 1) {
      for (std::size_t i = 0; i < m0.size(); ++i) out[f0 + i] += w * m0[i];
      return;
    }
    axis_masses(1, y[1], H, f1, m1);
    for (std::size_t i = 0; i < m0.size(); ++i) {
      for (std::size_t k = 0; k < m1.size(); ++k) out[(f0 + i) * ext[1] + f1 + k] += w * m0[i] * m1[k];
    }
  };

  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      if (a->weight(i) == 0.0) continue;
      deposit(a->weight(i), {a->point(i)[0], n == 2 ? a->point(i)[1] : 0.0}, 0.0);
    }
  } else {
    const auto& g = std::get<GridMeasure>(m);
    for (auto k : g.nonzero()) {
      deposit(g.weights()[k], {g.cell_lower(k, 0), n == 2 ? g.cell_lower(k, 1) : 0.0}, g.spacing());
    }
  }
  for (double& v : out) v = std::max(v, 0.0);  // clamp rounding-level negatives
  return GridMeasure(n, origin, s, ext, std::move(out));
}

}  // namespace riesz
