#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "riesz/energy.hpp"

namespace riesz {

enum class Verdict { convergent, divergent };

/// Energies of one alpha across the depths of a measure family.
struct DimensionRow {
  double alpha = 0.0;
  std::vector<double> energies;
  /// Regression slope of log|I_k - I_(k-1)| against depth (NaN if stationary).
  double increment_slope = std::numeric_limits<double>::quiet_NaN();
  /// Regression slope of log I_k against depth (diagnostic only).
  double energy_slope = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::convergent;
};

struct DimensionEstimate {
  double value = std::numeric_limits<double>::quiet_NaN();
  double lo = 0.0;  ///< bracket containing the estimate
  double hi = 0.0;
  bool inconclusive = false;
  std::string method;
  std::vector<DimensionRow> rows;  ///< capacitary: one per evaluated alpha, sorted by alpha
  DecayFit fit;                    ///< Fourier: the underlying decay fit
};

struct CapacitaryOptions {
  /// Alpha grid; empty means n * {0.02, 0.04, ..., 0.98}.
  std::vector<double> alphas;
  /// A row is convergent when the increment slope is at most this.
  double slope_threshold = 0.02;
  /// Bisection steps on the convergent/divergent boundary.
  int refinements = 1;
  /// Increments below this fraction of I_k count as zero.
  double stationary_rel = 1e-12;
};

using MeasureFamily = std::function<Measure(int depth)>;

namespace detail {

inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double nx = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nx;
  my /= nx;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

inline DimensionRow classify(double alpha, int n, const std::vector<Measure>& measures, std::span<const int> depths,
                             const CapacitaryOptions& opt) {
  DimensionRow row;
  row.alpha = alpha;
  const auto p = RieszParams::make(alpha, n);
  bool divergent = false;
  for (const auto& m : measures) {
    const auto e = spatial_energy(m, p);
    row.energies.push_back(e.value);
    divergent = divergent || e.divergent;
  }
  if (divergent) {
    row.verdict = Verdict::divergent;
    return row;
  }
  std::vector<double> d, le, di, linc;
  for (std::size_t k = 0; k < measures.size(); ++k) {
    d.push_back(depths[k]);
    le.push_back(std::log(row.energies[k]));
    if (k == 0) continue;
    const double inc = std::abs(row.energies[k] - row.energies[k - 1]);
    if (inc > opt.stationary_rel * std::abs(row.energies[k])) {
      di.push_back(depths[k]);
      linc.push_back(std::log(inc));
    }
  }
  if (d.size() >= 2) row.energy_slope = regression_slope(d, le);
  if (di.size() < 2) {
    row.verdict = Verdict::convergent;  // stationary sequence
    return row;
  }
  row.increment_slope = regression_slope(di, linc);
  row.verdict = row.increment_slope <= opt.slope_threshold ? Verdict::convergent : Verdict::divergent;
  return row;
}

}  // namespace detail

/// Capacitary dimension estimate from the energies of successive
/// approximations mu_k of a measure.
///
/// For each alpha the increments I_k - I_(k-1) are regressed in log scale
/// against depth: a non-positive growth rate (up to slope_threshold) means
/// the energies settle (convergent), a positive one means they grow
/// geometrically (divergent). The estimate is the convergent/divergent
/// boundary, refined by bisection. A classification that is not monotone in
/// alpha is reported as inconclusive.
inline DimensionEstimate capacitary_dimension(const MeasureFamily& family, std::span<const int> depths, int n,
                                              const CapacitaryOptions& opt = {}) {
  if (depths.size() < 4) throw DomainError("capacitary_dimension: need at least four depths");
  if (!std::is_sorted(depths.begin(), depths.end()) || std::adjacent_find(depths.begin(), depths.end()) != depths.end()) {
    throw DomainError("capacitary_dimension: depths must be strictly increasing");
  }
  std::vector<double> alphas = opt.alphas;
  if (alphas.empty()) {
    for (int k = 1; k <= 49; ++k) alphas.push_back(n * 0.02 * k);
  }
  std::sort(alphas.begin(), alphas.end());
  for (double a : alphas) {
    if (!(a > 0.0 && a < n)) throw DomainError("capacitary_dimension: every alpha must satisfy 0 < alpha < n");
  }
  std::vector<Measure> measures;
  for (int d : depths) {
    measures.push_back(family(d));
    if (dim(measures.back()) != n) throw DomainError("capacitary_dimension: family dimension differs from n");
  }

  DimensionEstimate est;
  est.method = "capacitary/increment-slope";
  for (double a : alphas) est.rows.push_back(detail::classify(a, n, measures, depths, opt));

  std::size_t first_div = est.rows.size();
  for (std::size_t i = 0; i < est.rows.size(); ++i) {
    if (est.rows[i].verdict == Verdict::divergent) {
      first_div = i;
      break;
    }
  }
  for (std::size_t i = first_div; i < est.rows.size(); ++i) {
    if (est.rows[i].verdict == Verdict::convergent) {
      est.inconclusive = true;
      est.lo = 0.0;
      est.hi = n;
      return est;
    }
  }
  if (first_div == 0) {
    est.value = 0.0;
    est.lo = 0.0;
    est.hi = alphas.front();
    return est;
  }
  if (first_div == est.rows.size()) {
    est.value = alphas.back();
    est.lo = alphas.back();
    est.hi = n;
    return est;
  }
  double lo = alphas[first_div - 1];
  double hi = alphas[first_div];
  for (int k = 0; k < opt.refinements; ++k) {
    const double mid = 0.5 * (lo + hi);
    auto row = detail::classify(mid, n, measures, depths, opt);
    (row.verdict == Verdict::convergent ? lo : hi) = mid;
    est.rows.push_back(std::move(row));
  }
  std::sort(est.rows.begin(), est.rows.end(), [](const auto& a, const auto& b) { return a.alpha < b.alpha; });
  est.lo = lo;
  est.hi = hi;
  est.value = 0.5 * (lo + hi);
  return est;
}

struct FourierOptions {
  /// Window [u_max 2^-annuli, u_max].
  int annuli = 10;
  /// Radial sample spacing as a fraction of 1 / diameter.
  double spacing = 0.25;
  double gamma_cap = 64.0;
};

/// Fourier decay exponent: min(n, gamma) where |mu^(u)|^2 ~ |u|^-gamma is
/// fitted over the window (see tail_decay_fit).
inline DimensionEstimate fourier_decay_exponent(const Measure& m, double u_max, const FourierOptions& opt = {}) {
  const int n = dim(m);
  if (n > 2) throw UnsupportedError("fourier_decay_exponent: implemented for n <= 2");
  if (!(u_max > 0.0)) throw DomainError("fourier_decay_exponent: u_max must be positive");
  const double lo = u_max * std::ldexp(1.0, -opt.annuli);
  const double D = support_diameter(m);
  double step = D > 0.0 ? opt.spacing / D : (u_max - lo) / 4096.0;
  std::size_t count = static_cast<std::size_t>(std::ceil((u_max - lo) / step)) + 1;
  step = (u_max - lo) / static_cast<double>(count - 1);

  Spectrum s;
  s.dim = 1;
  s.mass = mass(m);
  s.freqs.resize(count);
  s.values.resize(count);
  for (std::size_t k = 0; k < count; ++k) s.freqs[k] = k + 1 == count ? u_max : lo + step * static_cast<double>(k);

  const auto* grid = std::get_if<GridMeasure>(&m);
  if (grid && n == 1) {
    // lattice sums on the uniform radial grid by chirp-z, in blocks
    const double h = grid->spacing();
    std::vector<Complex> x(grid->extent()[0]);
    constexpr std::size_t block = std::size_t{1} << 17;
    constexpr long double two_pi = 6.283185307179586476925286766559005768L;
    for (std::size_t k0 = 0; k0 < count; k0 += block) {
      const std::size_t cnt = std::min(block, count - k0);
      const long double u0 = static_cast<long double>(lo) + static_cast<long double>(step) * static_cast<long double>(k0);
      for (std::size_t j = 0; j < x.size(); ++j) {
        const long double ph = std::fmod(u0 * static_cast<long double>(h) * static_cast<long double>(j), two_pi);
        x[j] = grid->weights()[j] * std::polar(1.0, static_cast<double>(ph));
      }
      const auto L = detail::chirp_z(x, cnt, step * h);
      for (std::size_t k = 0; k < cnt; ++k) s.values[k0 + k] = L[k] * detail::sinc(0.5 * s.freqs[k0 + k] * h);
    }
  } else {
    parallel_for(count, [&](std::size_t k) {
      const double r = s.freqs[k];
      if (n == 1) {
        const double u[1] = {r};
        s.values[k] = fourier_transform(m, u);
        return;
      }
      const std::size_t M = std::max<std::size_t>(32, static_cast<std::size_t>(std::ceil(r * D)) + 32);
      double best = -1.0;
      Complex arg;
      for (std::size_t j = 0; j < M; ++j) {
        const double th = std::numbers::pi * static_cast<double>(j) / static_cast<double>(M);
        const double u[2] = {r * std::cos(th), r * std::sin(th)};
        const Complex v = fourier_transform(m, u);
        if (std::norm(v) > best) {
          best = std::norm(v);
          arg = v;
        }
      }
      s.values[k] = arg;
    });
  }

  FitOptions fo;
  fo.min_annuli = opt.annuli;
  fo.gamma_cap = opt.gamma_cap;
  DimensionEstimate est;
  est.fit = tail_decay_fit(s, lo, u_max, fo);
  est.value = std::min(static_cast<double>(n), est.fit.gamma) + 0.0;
  est.lo = lo;
  est.hi = u_max;
  est.method = "fourier/annulus-max";
  return est;
}

}  // namespace riesz
