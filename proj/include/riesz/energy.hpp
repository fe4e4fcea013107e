#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/measure.hpp"
#include "riesz/mollify.hpp"
#include "riesz/parallel.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/specfun.hpp"
#include "riesz/spectrum.hpp"

namespace riesz {

/// Result of an energy computation. `value` already includes any tail
/// correction; the two error fields are separate estimates of the remaining
/// quadrature and truncation error.
struct EnergyEstimate {
  double value = 0.0;
  double quadrature_error = 0.0;
  double tail_error = 0.0;
  double truncated = std::numeric_limits<double>::quiet_NaN();  ///< spectral: integral up to u_max
  bool divergent = false;
  bool off_diagonal = false;  ///< diagonal removed; not the energy of the measure
  std::string method;

  double error() const { return quadrature_error + tail_error; }
};

inline EnergyEstimate divergent_estimate(std::string method) {
  EnergyEstimate e;
  e.value = std::numeric_limits<double>::infinity();
  e.divergent = true;
  e.method = std::move(method);
  return e;
}

/// Power-law fit |mu^(u)|^2 ~ C |u|^-gamma over a window of dyadic annuli.
struct DecayFit {
  double gamma = 0.0;
  double log_constant = 0.0;  ///< log C, C chosen so C r^-gamma bounds every annulus maximum
  double slope = 0.0;         ///< raw regression slope (before clamping)
  double residual = 0.0;      ///< RMS residual of the regression in log space
  bool floor_hit = false;     ///< some annulus maximum fell below the numerical floor
  std::vector<double> radii;  ///< argmax radius per annulus
  std::vector<double> maxima; ///< max |mu^|^2 per annulus
};

struct FitOptions {
  int min_annuli = 8;
  double gamma_cap = 64.0;
  double floor = 1e-28;  ///< relative to mass^2
};

/// Fits the decay of |values|^2 against |freq| inside [lo, hi]. The window is
/// split into dyadic annuli [lo 2^j, lo 2^(j+1)); the log of each annulus
/// maximum is regressed on the log of its argmax radius and
/// gamma = clamp(-slope, 0, gamma_cap). Once maxima reach the numerical floor
/// the decay is faster than any power the window can resolve and gamma is set
/// to the cap.
inline DecayFit tail_decay_fit(const Spectrum& s, double lo, double hi, const FitOptions& opt = {}) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("tail_decay_fit: need 0 < lo < hi");
  const int annuli = static_cast<int>(std::floor(std::log2(hi / lo) + 1e-9));
  if (annuli < opt.min_annuli) {
    throw DomainError("tail_decay_fit: window must span at least " + std::to_string(opt.min_annuli) + " dyadic annuli");
  }
  std::vector<double> best(static_cast<std::size_t>(annuli), -1.0);
  std::vector<double> where(static_cast<std::size_t>(annuli), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = s.radius(i);
    if (r < lo || r > hi) continue;
    int j = static_cast<int>(std::floor(std::log2(r / lo)));
    j = std::clamp(j, 0, annuli - 1);
    const double v = std::norm(s.values[i]);
    if (v > best[j]) {
      best[j] = v;
      where[j] = r;
    }
  }
  DecayFit fit;
  const double ref = s.mass > 0.0 ? s.mass * s.mass : 1.0;
  const double threshold = opt.floor * ref;
  std::vector<double> xs, ys;
  bool any_positive = false;
  for (int j = 0; j < annuli; ++j) {
    if (best[j] < 0.0) continue;  // empty annulus
    fit.radii.push_back(where[j]);
    fit.maxima.push_back(best[j]);
    if (best[j] > 0.0) any_positive = true;
    if (best[j] <= threshold) {
      fit.floor_hit = true;
      continue;
    }
    xs.push_back(std::log(where[j]));
    ys.push_back(std::log(best[j]));
  }
  if (!any_positive && !fit.radii.empty()) throw DegenerateFitError("tail_decay_fit: spectrum vanishes on the window");
  if (fit.radii.size() < 2) throw DegenerateFitError("tail_decay_fit: fewer than two populated annuli");

  if (xs.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw DegenerateFitError("tail_decay_fit: all annulus maxima at one radius");
    fit.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (my + fit.slope * (xs[i] - mx));
      rss += e * e;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(xs.size()));
  }
  fit.gamma = (fit.floor_hit || xs.size() < 2) ? opt.gamma_cap : std::clamp(-fit.slope, 0.0, opt.gamma_cap);

  fit.log_constant = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fit.radii.size(); ++i) {
    const double v = std::max(fit.maxima[i], threshold);
    fit.log_constant = std::max(fit.log_constant, std::log(v) + fit.gamma * std::log(fit.radii[i]));
  }
  return fit;
}

namespace detail {

struct PairMean {
  double value;
  double error;
};

/// Mean of |x - y|^-alpha over x uniform on a cell of width h and y uniform
/// on the same cell shifted by t (n = 1, alpha < 1). Exact second difference
/// of the double antiderivative for |t| <= 64 h, moment expansion beyond.
inline PairMean cell_pair_1d(double t, double h, double alpha) {
  t = std::abs(t);
  if (t <= 64.0 * h) {
    const long double a = alpha;
    const long double norm = (1.0L - a) * (2.0L - a);
    auto G = [&](long double s) { return std::pow(std::abs(s), 2.0L - a) / norm; };
    const long double lh = h;
    const long double lt = t;
    const long double v = (G(lt + lh) - 2.0L * G(lt) + G(lt - lh)) / (lh * lh);
    const long double err = 16.0L * std::numeric_limits<long double>::epsilon() * G(lt + lh) / (lh * lh);
    return {static_cast<double>(v), static_cast<double>(err)};
  }
  const double g = std::pow(t, -alpha);
  const double x2 = (h / t) * (h / t);
  const double a2 = alpha * (alpha + 1.0);
  const double a4 = a2 * (alpha + 2.0) * (alpha + 3.0);
  const double a6 = a4 * (alpha + 4.0) * (alpha + 5.0);
  // triangular offset density: E s^2 = h^2/6, E s^4 = h^4/15, E s^6 = h^6/28
  return {g * (1.0 + a2 * x2 / 12.0 + a4 * x2 * x2 / 360.0), g * a6 * x2 * x2 * x2 / 20160.0};
}

/// Same for unit squares offset by the integer vector (a0, a1) (n = 2,
/// alpha < 2). Multiply by h^-alpha for cells of side h.
///
/// The offset s = y - x has the tent density (1-|s0|)(1-|s1|); each of its
/// four quadrants is integrated separately. When the singular point sits at a
/// quadrant corner the radial integral is done in closed form and the angle
/// by Gauss-Legendre; otherwise a tensor Gauss-Legendre rule is used.
inline PairMean cell_pair_2d(std::int64_t a0, std::int64_t a1, double alpha) {
  const bool far = std::max(std::abs(a0), std::abs(a1)) >= 3;
  const GaussRule& t_hi = gauss_legendre(far ? 6 : 10);
  const GaussRule& t_lo = gauss_legendre(far ? 4 : 8);
  const GaussRule& p_hi = gauss_legendre(24);
  const GaussRule& p_lo = gauss_legendre(16);
  constexpr double quarter = std::numbers::pi / 4.0;
  double total = 0.0;
  double err = 0.0;
  auto corner = [](std::int64_t a, int sigma) -> int {
    if (a == 0) return 0;
    if (a == -sigma) return 1;
    return -1;
  };
  for (int s0 : {1, -1}) {
    for (int s1 : {1, -1}) {
      const int c0 = corner(a0, s0);
      const int c1 = corner(a1, s1);
      if (c0 >= 0 && c1 >= 0) {
        // weight (1 - r0)(1 - r1) rewritten in coordinates rho measured from the corner
        const double p0 = c0 == 0 ? 1.0 : 0.0, q0 = c0 == 0 ? -1.0 : 1.0;
        const double p1 = c1 == 0 ? 1.0 : 0.0, q1 = c1 == 0 ? -1.0 : 1.0;
        const double k0 = p0 * p1, k1 = q0 * p1, k2 = p0 * q1, k3 = q0 * q1;
        auto F = [&](double th, double R) {
          const double c = std::cos(th), s = std::sin(th);
          return k0 * std::pow(R, 2.0 - alpha) / (2.0 - alpha) + (k1 * c + k2 * s) * std::pow(R, 3.0 - alpha) / (3.0 - alpha) +
                 k3 * c * s * std::pow(R, 4.0 - alpha) / (4.0 - alpha);
        };
        auto polar = [&](const GaussRule& r) {
          return r.integrate(0.0, quarter, [&](double th) { return F(th, 1.0 / std::cos(th)); }) +
                 r.integrate(quarter, 2.0 * quarter, [&](double th) { return F(th, 1.0 / std::sin(th)); });
        };
        const double hi = polar(p_hi);
        total += hi;
        err += std::abs(hi - polar(p_lo));
      } else {
        auto tensor = [&](const GaussRule& r) {
          double acc = 0.0;
          for (std::size_t i = 0; i < r.size(); ++i) {
            const double r0 = 0.5 * (1.0 + r.nodes[i]);
            const double t0 = static_cast<double>(a0) + s0 * r0;
            for (std::size_t j = 0; j < r.size(); ++j) {
              const double r1 = 0.5 * (1.0 + r.nodes[j]);
              const double t1 = static_cast<double>(a1) + s1 * r1;
              acc += r.weights[i] * r.weights[j] * (1.0 - r0) * (1.0 - r1) * std::pow(t0 * t0 + t1 * t1, -0.5 * alpha);
            }
          }
          return 0.25 * acc;
        };
        const double hi = tensor(t_hi);
        total += hi;
        err += std::abs(hi - tensor(t_lo));
      }
    }
  }
  return {total, err};
}

/// Autocorrelation C(d0, d1) = sum_x w_x w_{x+d} of the grid weights for
/// d0 in [0, E0) and d1 in (-E1, E1), stored as C[d0 * (2 E1 - 1) + d1 + E1 - 1].
inline std::vector<double> autocorrelation(const GridMeasure& g) {
  const auto ext = g.extent();
  const std::size_t w1 = 2 * ext[1] - 1;
  std::size_t p0 = 1, p1 = 1;
  while (p0 < 2 * ext[0] - 1) p0 <<= 1;
  while (p1 < 2 * ext[1] - 1) p1 <<= 1;
  const bool two_d = g.dim() == 2 && p1 > 1;
  FftPlan fwd(p0, FFTW_FORWARD, two_d ? p1 : 0);
  FftPlan inv(p0, FFTW_BACKWARD, two_d ? p1 : 0);
  if (!two_d) p1 = 1;
  Complex* a = fwd.data();
  std::fill(a, a + p0 * p1, Complex{0.0, 0.0});
  for (std::size_t i0 = 0; i0 < ext[0]; ++i0) {
    for (std::size_t i1 = 0; i1 < ext[1]; ++i1) a[i0 * p1 + i1] = g.weight(i0, i1);
  }
  fwd.execute();
  Complex* b = inv.data();
  for (std::size_t i = 0; i < p0 * p1; ++i) b[i] = std::norm(a[i]);
  inv.execute();
  const double scale = 1.0 / static_cast<double>(p0 * p1);
  std::vector<double> c(ext[0] * w1, 0.0);
  const auto e1 = static_cast<std::int64_t>(ext[1]);
  for (std::size_t d0 = 0; d0 < ext[0]; ++d0) {
    for (std::int64_t d1 = -(e1 - 1); d1 < e1; ++d1) {
      const std::size_t col = d1 >= 0 ? static_cast<std::size_t>(d1) : p1 - static_cast<std::size_t>(-d1);
      c[d0 * w1 + static_cast<std::size_t>(d1 + e1 - 1)] = b[d0 * p1 + col].real() * scale;
    }
  }
  return c;
}

/// Largest nonzero count for which grid energies use explicit pair sums
/// (above it, an FFT autocorrelation of the weights).
inline constexpr std::size_t kDirectPairLimit = std::size_t{1} << 15;

/// sum_{a,b} w_a w_b T(|i_a - i_b|) for a lag table T (row-major E0 x E1,
/// two values per entry: mean kernel and its error).
inline std::pair<double, double> pair_sum(const GridMeasure& g, const std::vector<double>& table,
                                          const std::vector<double>& table_err) {
  const auto ext = g.extent();
  const auto& nz = g.nonzero();
  const auto& w = g.weights();
  auto lag = [&](std::size_t a, std::size_t b) {
    const auto ia = g.unflatten(a);
    const auto ib = g.unflatten(b);
    const std::size_t d0 = ia[0] > ib[0] ? ia[0] - ib[0] : ib[0] - ia[0];
    const std::size_t d1 = ia[1] > ib[1] ? ia[1] - ib[1] : ib[1] - ia[1];
    return d0 * ext[1] + d1;
  };
  const std::size_t limit = g.dim() == 1 ? kDirectPairLimit : 4096;
  if (nz.size() <= limit) {
    const std::size_t chunk = 16;
    auto row = [&](std::size_t i, const std::vector<double>& t) {
      const std::size_t a = nz[i];
      double s = 0.0;
      for (std::size_t j = i + 1; j < nz.size(); ++j) s += w[nz[j]] * t[lag(a, nz[j])];
      return w[a] * (w[a] * t[0] + 2.0 * s);
    };
    const double v = deterministic_sum(nz.size(), [&](std::size_t i) { return row(i, table); }, chunk);
    const double e = deterministic_sum(nz.size(), [&](std::size_t i) { return row(i, table_err); }, chunk);
    return {v, e};
  }
  const auto c = autocorrelation(g);
  const std::size_t w1 = 2 * ext[1] - 1;
  const auto e1 = static_cast<std::int64_t>(ext[1]);
  double v = 0.0, e = 0.0;
  for (std::size_t d0 = 0; d0 < ext[0]; ++d0) {
    const double mult = d0 == 0 ? 1.0 : 2.0;
    for (std::int64_t d1 = -(e1 - 1); d1 < e1; ++d1) {
      const double cv = c[d0 * w1 + static_cast<std::size_t>(d1 + e1 - 1)];
      const std::size_t k = d0 * ext[1] + static_cast<std::size_t>(std::abs(d1));
      v += mult * cv * table[k];
      e += mult * std::abs(cv) * table_err[k];
    }
  }
  return {v, e};
}

}  // namespace detail

struct SpatialOptions {
  /// Drop the diagonal of atomic measures. The result is labelled off_diagonal
  /// and is not the energy of the measure.
  bool off_diagonal = false;
};

/// I_alpha(mu) = int int |x - y|^-alpha dmu(x) dmu(y), evaluated in space.
///
/// Atomic measures: any atom makes the energy infinite (flagged divergent).
/// Grid measures: exact cell-pair means (see detail::cell_pair_1d/2d) summed
/// over all pairs of occupied cells.
inline EnergyEstimate spatial_energy(const Measure& m, const RieszParams& p, const SpatialOptions& opt = {}) {
  if (dim(m) != p.n) throw DomainError("spatial_energy: measure dimension differs from kernel dimension");
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    if (!opt.off_diagonal) return divergent_estimate("spatial/atomic");
    const int n = a->dim();
    bool collision = false;
    const double v = deterministic_sum(
        a->size(),
        [&](std::size_t i) {
          double s = 0.0;
          for (std::size_t j = i + 1; j < a->size(); ++j) {
            double r2 = 0.0;
            for (int d = 0; d < n; ++d) {
              const double t = a->point(i)[d] - a->point(j)[d];
              r2 += t * t;
            }
            if (r2 == 0.0 && a->weight(i) > 0.0 && a->weight(j) > 0.0) collision = true;
            if (r2 > 0.0) s += a->weight(j) * std::pow(r2, -0.5 * p.alpha);
          }
          return 2.0 * a->weight(i) * s;
        },
        16);
    if (collision) {
      auto e = divergent_estimate("spatial/atomic-offdiag");
      e.off_diagonal = true;
      return e;
    }
    EnergyEstimate e;
    e.value = v;
    e.off_diagonal = true;
    e.method = "spatial/atomic-offdiag";
    return e;
  }

  const auto& g = std::get<GridMeasure>(m);
  const auto ext = g.extent();
  const double h = g.spacing();
  std::vector<double> table(ext[0] * ext[1]);
  std::vector<double> table_err(ext[0] * ext[1]);
  if (g.dim() == 1) {
    parallel_for(ext[0], [&](std::size_t d) {
      const auto pm = detail::cell_pair_1d(static_cast<double>(d) * h, h, p.alpha);
      table[d] = pm.value;
      table_err[d] = pm.error;
    });
  } else {
    const double scale = std::pow(h, -p.alpha);
    parallel_for(table.size(), [&](std::size_t k) {
      const auto pm = detail::cell_pair_2d(static_cast<std::int64_t>(k / ext[1]), static_cast<std::int64_t>(k % ext[1]), p.alpha);
      table[k] = pm.value * scale;
      table_err[k] = pm.error * scale;
    });
  }
  const auto [v, e] = detail::pair_sum(g, table, table_err);
  EnergyEstimate est;
  est.value = v;
  est.quadrature_error = e + 1e-14 * std::abs(v);
  est.method = g.dim() == 1 ? "spatial/grid1d" : "spatial/grid2d";
  return est;
}

namespace detail {

/// Radial weight of the spectral integrand: c(alpha, n) (2 pi)^-n |S^{n-1}|.
inline double spectral_prefactor(const RieszParams& p) {
  return riesz_constant(p) * std::pow(2.0 * std::numbers::pi, -p.n) * unit_sphere_area(p.n);
}

}  // namespace detail

/// Largest nonzero count for which mollified_energy sums kernel convolutions
/// over atom pairs or cell lags directly.
inline constexpr double kMollifiedDirectBudget = 4e8;

/// int int (k * psi)(x - y) dmu(x) dmu(y) with psi = phi * phi (order 2).
///
/// Atomic measures: kernel_convolve at every atom difference.
/// 1D grids: for every cell lag d, the lag kernel int psi(u) K(d h - u) du
/// with K the exact cell-pair mean.
/// 2D grids (and 1D grids too fine for the lag sum): the spatial energy of
/// phi * mu from mollify_measure, extrapolated from spacings eps/16 and eps/8.
inline EnergyEstimate mollified_energy(const Measure& m, const RieszParams& p, const Mollifier& psi) {
  if (psi.order() != 2) throw DomainError("mollified_energy: expects psi = self_convolve(phi)");
  if (dim(m) != p.n || psi.dim() != p.n) throw DomainError("mollified_energy: dimension mismatch");
  if (p.n > 2) throw UnsupportedError("mollified_energy: implemented for n <= 2");

  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    const int n = a->dim();
    const double k0 = kernel_convolve(p, psi, std::vector<double>(static_cast<std::size_t>(n), 0.0));
    const double v = deterministic_sum(
        a->size(),
        [&](std::size_t i) {
          double s = 0.0;
          double diff[2];
          for (std::size_t j = i + 1; j < a->size(); ++j) {
            if (a->weight(j) == 0.0) continue;
            for (int d = 0; d < n; ++d) diff[d] = a->point(i)[d] - a->point(j)[d];
            s += a->weight(j) * kernel_convolve(p, psi, std::span<const double>(diff, static_cast<std::size_t>(n)));
          }
          return a->weight(i) * (a->weight(i) * k0 + 2.0 * s);
        },
        1);
    EnergyEstimate e;
    e.value = v;
    // far pieces use 4-point Gauss-Legendre at >= 32 steps from the singular point
    e.quadrature_error = 1e-10 * std::abs(v);
    e.method = "mollified/atomic";
    return e;
  }

  const auto& g = std::get<GridMeasure>(m);
  const LatticeProfile& prof = psi.axis_profile();
  const double work = static_cast<double>(g.extent()[0]) * static_cast<double>(prof.samples().size());
  if (g.dim() == 1 && work <= kMollifiedDirectBudget) {
    const double h = g.spacing();
    const double step = prof.spacing() * psi.eps();
    const auto& v = prof.samples();
    const double inv = 1.0 / psi.eps();
    const GaussRule& g2 = gauss_legendre(2);
    const std::size_t E = g.extent()[0];
    std::vector<double> lag(E), lag_err(E);
    parallel_for(E, [&](std::size_t d) {
      const double t = static_cast<double>(d) * h;
      double hi = 0.0, lo = 0.0;
      for (std::size_t j = 0; j + 1 < v.size(); ++j) {
        const double a0 = v[j] * inv;
        const double b0 = v[j + 1] * inv;
        if (a0 == 0.0 && b0 == 0.0) continue;
        const double u0 = prof.knot(j) * psi.eps();
        auto f = [&](double u) {
          return (a0 + (b0 - a0) * (u - u0) / step) * detail::cell_pair_1d(t - u, h, p.alpha).value;
        };
        hi += g2.integrate(u0, u0 + step, f);
        lo += step * f(u0 + 0.5 * step);
      }
      lag[d] = hi;
      lag_err[d] = std::abs(hi - lo);
    });
    const auto [val, err] = detail::pair_sum(g, lag, lag_err);
    EnergyEstimate e;
    e.value = val;
    e.quadrature_error = err + 1e-14 * std::abs(val);
    e.method = "mollified/grid1d-lag";
    return e;
  }

  const Mollifier phi = psi.factor();
  const double s = psi.eps() * kMollifySpacingFraction;
  const auto fine = spatial_energy(mollify_measure(m, phi, s), p);
  const auto coarse = spatial_energy(mollify_measure(m, phi, 2.0 * s), p);
  EnergyEstimate e;
  const double diff = fine.value - coarse.value;
  e.value = fine.value + diff / 3.0;
  e.quadrature_error = std::abs(diff) / 3.0 + fine.quadrature_error;
  e.method = "mollified/smoothed-grid";
  return e;
}

enum class SpectralPath { automatic, direct, fast };

struct SpectralOptions {
  double u_max = 1e4;
  /// Minimum number of radial panels (direct) or uniform intervals (fast).
  std::size_t samples = 1024;
  /// [0, u_min] is integrated in closed form with mu^ ~ mu^(0).
  double u_min = 1e-3;
  /// fast: 1D grid measures only (chirp-z on a uniform frequency grid).
  SpectralPath path = SpectralPath::automatic;
  int fit_annuli = 8;
  double gamma_cap = 64.0;
};

namespace detail {

/// (2 pi)^-n int k^(u) W(u) |mu^(u)|^2 du with W = 1 or a mollifier weight.
inline EnergyEstimate spectral_engine(const Measure& m, const RieszParams& p, const SpectralOptions& opt,
                                      const Mollifier* moll) {
  if (dim(m) != p.n) throw DomainError("spectral energy: measure dimension differs from kernel dimension");
  if (p.n > 2) throw UnsupportedError("spectral energy: implemented for n <= 2");
  if (!(opt.u_min > 0.0) || !(opt.u_max > 2.0 * opt.u_min)) throw DomainError("spectral energy: need 0 < 2 u_min < u_max");
  if (opt.samples < 64) throw DomainError("spectral energy: samples must be >= 64");
  if (moll) {
    if (moll->dim() != p.n) throw DomainError("spectral energy: mollifier dimension mismatch");
    const double v = moll->eps() * opt.u_max / moll->axis_scale() * moll->axis_profile().spacing();
    if (v > 0.5 * std::numbers::pi) {
      throw ResolutionError("spectral energy: u_max exceeds the resolution of the mollifier profile lattice");
    }
  }
  const int n = p.n;
  const double alpha = p.alpha;
  const double pref = spectral_prefactor(p);
  const double total_mass = mass(m);
  const double D = support_diameter(m);
  const auto* grid = std::get_if<GridMeasure>(&m);

  auto weight = [&](std::span<const double> u) {
    if (!moll) return 1.0;
    const double t = moll->transform(u);
    return moll->order() == 2 ? t : t * t;
  };
  // average of |mu^|^2 W over the sphere of radius r (|mu^| is even, so the
  // half circle suffices in 2D): {value, error, max sample}
  struct Radial {
    double value;
    double error;
    double peak;
  };
  auto radial = [&](double r) -> Radial {
    if (n == 1) {
      const double u[1] = {r};
      const double v = std::norm(fourier_transform(m, u)) * weight(u);
      return {v, 0.0, v};
    }
    std::size_t M = std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(r * D)) + 32);
    M += M % 2;
    double full = 0.0, half = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
      const double th = std::numbers::pi * static_cast<double>(k) / static_cast<double>(M);
      const double u[2] = {r * std::cos(th), r * std::sin(th)};
      const double v = std::norm(fourier_transform(m, u)) * weight(u);
      full += v;
      if (k % 2 == 0) half += v;
      peak = std::max(peak, v);
    }
    full /= static_cast<double>(M);
    half /= static_cast<double>(M / 2);
    return {full, std::abs(full - half), peak};
  };

  EnergyEstimate est;
  est.method = moll ? "spectral/mollified" : "spectral";
  double value = 0.0;
  double qerr = 0.0;

  // [0, u_min]: |mu^|^2 W ~ mass^2, error from |mu^(u)|^2 >= mass^2 (1 - D^2 u^2)
  {
    const double w0 = moll ? weight(std::vector<double>(static_cast<std::size_t>(n), 0.0)) : 1.0;
    value += pref * total_mass * total_mass * w0 * std::pow(opt.u_min, alpha) / alpha;
    qerr += pref * total_mass * total_mass * (D * D + 1.0) * std::pow(opt.u_min, alpha + 2.0) / (alpha + 2.0);
  }

  const bool fast = opt.path == SpectralPath::fast || (opt.path == SpectralPath::automatic && grid && n == 1);
  if (fast && !(grid && n == 1)) throw UnsupportedError("spectral energy: fast path needs a 1D grid measure");
  const double scale_len = D > 0.0 ? D : 1.0;
  const double fit_lo = opt.u_max * std::ldexp(1.0, -opt.fit_annuli);
  Spectrum tail_samples;
  tail_samples.dim = 1;
  tail_samples.mass = total_mass;

  double gl_hi = opt.u_max;
  if (fast) gl_hi = std::min(opt.u_max, std::max(4.0 * opt.u_min, 8.0 / scale_len));

  // graded Gauss-Legendre part on [u_min, gl_hi]
  {
    // on the fast path `samples` applies to the uniform part only
    const double width = fast ? 2.0 / scale_len
                              : std::min(2.0 / scale_len, (gl_hi - opt.u_min) / static_cast<double>(opt.samples));
    const auto panels = graded_panels(opt.u_min, gl_hi, width);
    const GaussRule& g8 = gauss_legendre(8);
    const GaussRule& g4 = gauss_legendre(4);
    std::vector<double> hi(panels.size()), lo(panels.size()), perr(panels.size());
    std::vector<std::vector<std::pair<double, double>>> peaks(panels.size());
    parallel_for(panels.size(), [&](std::size_t i) {
      const auto pn = panels[i];
      double angular_err = 0.0;
      auto f = [&](double r, bool record) {
        const Radial rv = radial(r);
        if (record) {
          angular_err += rv.error * std::pow(r, alpha - 1.0);
          if (r >= fit_lo) peaks[i].emplace_back(r, rv.peak);
        }
        return std::pow(r, alpha - 1.0) * rv.value;
      };
      hi[i] = g8.integrate(pn.lo, pn.hi, [&](double r) { return f(r, true); });
      lo[i] = g4.integrate(pn.lo, pn.hi, [&](double r) { return f(r, false); });
      perr[i] = angular_err * (pn.hi - pn.lo) / static_cast<double>(g8.size());
    });
    double s = 0.0, e = 0.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      s += hi[i];
      e += std::abs(hi[i] - lo[i]) + perr[i];
      for (auto [r, v] : peaks[i]) {
        tail_samples.freqs.push_back(r);
        tail_samples.values.emplace_back(std::sqrt(v), 0.0);
      }
    }
    value += pref * s;
    qerr += pref * e;
  }

  // composite Simpson on a uniform grid of [gl_hi, u_max], lattice sums by chirp-z
  if (fast && gl_hi < opt.u_max) {
    const auto& g = *grid;
    const double h = g.spacing();
    const double target = 0.05 / scale_len;
    std::size_t N = std::max<std::size_t>(opt.samples, static_cast<std::size_t>(std::ceil((opt.u_max - gl_hi) / target)));
    N = (N + 3) / 4 * 4;
    const double du = (opt.u_max - gl_hi) / static_cast<double>(N);
    std::vector<double> f(N + 1);
    std::vector<Complex> x(g.extent()[0]);
    constexpr std::size_t block = std::size_t{1} << 17;
    constexpr long double two_pi = 6.283185307179586476925286766559005768L;
    for (std::size_t k0 = 0; k0 <= N; k0 += block) {
      const std::size_t cnt = std::min(block, N + 1 - k0);
      const long double u0 = static_cast<long double>(gl_hi) + static_cast<long double>(du) * static_cast<long double>(k0);
      for (std::size_t j = 0; j < x.size(); ++j) {
        const long double ph = std::fmod(u0 * static_cast<long double>(h) * static_cast<long double>(j), two_pi);
        x[j] = g.weights()[j] * std::polar(1.0, static_cast<double>(ph));
      }
      const auto L = detail::chirp_z(x, cnt, du * h);
      for (std::size_t k = 0; k < cnt; ++k) {
        const double u = gl_hi + du * static_cast<double>(k0 + k);
        const double uu[1] = {u};
        const double env = detail::sinc(0.5 * u * h);
        f[k0 + k] = std::norm(L[k]) * env * env * weight(uu);
      }
    }
    auto integrand = [&](std::size_t k) {
      const double u = (k == N) ? opt.u_max : gl_hi + du * static_cast<double>(k);
      return std::pow(u, alpha - 1.0) * f[k];
    };
    double s1 = integrand(0) + integrand(N);
    double s2 = s1;
    for (std::size_t k = 1; k < N; ++k) {
      const double v = integrand(k);
      s1 += (k % 2 == 1 ? 4.0 : 2.0) * v;
      if (k % 2 == 0) s2 += (k % 4 == 2 ? 4.0 : 2.0) * v;
    }
    const double simpson = s1 * du / 3.0;
    const double coarse = s2 * 2.0 * du / 3.0;
    value += pref * simpson;
    qerr += pref * std::abs(simpson - coarse) / 15.0;
    for (std::size_t k = 0; k <= N; ++k) {
      const double u = gl_hi + du * static_cast<double>(k);
      if (u < fit_lo) continue;
      tail_samples.freqs.push_back(u);
      tail_samples.values.emplace_back(std::sqrt(f[k]), 0.0);
    }
  }

  est.truncated = value;
  est.quadrature_error = qerr;

  // Tail beyond u_max.
  if (grid && n == 1 && !moll) {
    // |mu^|^2 = u^-2 Q(u), Q(u) = (2/h^2)(1 - cos uh) sum_d A_d e^{iudh} with A
    // the weight autocorrelation. Q is a trigonometric polynomial in uh with
    // coefficients c_k = (2/h^2)(A_k - (A_(k-1) + A_(k+1)) / 2). Its mean c_0
    // gives the tail; the rest has an antiderivative bounded by
    // sum |c_k| / (|k| h), and integrating by parts against u^(alpha - 3)
    // bounds the remainder by twice that times U^(alpha - 3).
    const auto& g = *grid;
    const double h = g.spacing();
    const auto A = autocorrelation(g);
    auto lag = [&](std::int64_t k) {
      const auto a = static_cast<std::size_t>(std::abs(k));
      return a < A.size() ? A[a] : 0.0;
    };
    const double qbar = 2.0 * (lag(0) - lag(1)) / (h * h);
    double osc = 0.0;
    for (std::int64_t k = 1; k <= static_cast<std::int64_t>(A.size()); ++k) {
      const double ck = 2.0 * (lag(k) - 0.5 * (lag(k - 1) + lag(k + 1))) / (h * h);
      osc += 2.0 * std::abs(ck) / (static_cast<double>(k) * h);  // +-k
    }
    const double U = opt.u_max;
    const double tail = pref * qbar * std::pow(U, alpha - 2.0) / (2.0 - alpha);
    est.value = value + tail;
    est.tail_error = pref * 2.0 * osc * std::pow(U, alpha - 3.0);
    est.method += "/lattice-tail";
    return est;
  }

  FitOptions fo;
  fo.min_annuli = opt.fit_annuli;
  fo.gamma_cap = opt.gamma_cap;
  DecayFit fit;
  try {
    fit = tail_decay_fit(tail_samples, fit_lo, opt.u_max, fo);
  } catch (const DegenerateFitError&) {
    // nothing to extrapolate from: treat as non-decaying
    auto e = divergent_estimate(est.method);
    e.truncated = value;
    e.quadrature_error = qerr;
    return e;
  }
  if (!(fit.gamma > alpha)) {
    auto e = divergent_estimate(est.method);
    e.truncated = value;
    e.quadrature_error = qerr;
    return e;
  }
  // C r^-gamma bounds the angular maxima; integrate r^(alpha - 1 - gamma)
  const double bound =
      pref * std::exp(fit.log_constant + (alpha - fit.gamma) * std::log(opt.u_max)) / (fit.gamma - alpha);
  // the fitted envelope only bounds the tail, so report the midpoint of [0, bound]
  est.value = value + 0.5 * bound;
  est.tail_error = 0.5 * bound;
  est.method += "/fitted-tail";
  return est;
}

}  // namespace detail

/// (2 pi)^-n int k^(u) |mu^(u)|^2 du.
inline EnergyEstimate spectral_energy(const Measure& m, const RieszParams& p, const SpectralOptions& opt = {}) {
  return detail::spectral_engine(m, p, opt, nullptr);
}

/// (2 pi)^-n int k^(u) |phi^(u)|^2 |mu^(u)|^2 du. Accepts phi (order 1) or
/// psi = phi * phi (order 2); both give the same integrand.
inline EnergyEstimate mollified_spectral_energy(const Measure& m, const RieszParams& p, const Mollifier& phi,
                                                const SpectralOptions& opt = {}) {
  return detail::spectral_engine(m, p, opt, &phi);
}

}  // namespace riesz
