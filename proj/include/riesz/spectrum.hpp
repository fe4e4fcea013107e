#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "riesz/error.hpp"
#include "riesz/measure.hpp"
#include "riesz/parallel.hpp"

namespace riesz {

/// Samples of a measure's Fourier transform.
struct Spectrum {
  int dim = 1;
  std::vector<double> freqs;    ///< row-major, dim entries per sample
  std::vector<Complex> values;  ///< mu^ at each frequency
  double mass = 0.0;            ///< total mass of the source measure

  std::size_t size() const { return values.size(); }
  double radius(std::size_t i) const {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += freqs[i * dim + d] * freqs[i * dim + d];
    return std::sqrt(s);
  }
};

enum class SpectrumMode { direct, fast };

namespace detail {

/// Minimal RAII wrapper for an in-place complex FFTW plan (1D, or 2D
/// row-major n0 x n1 when n1 > 0).
class FftPlan {
public:
  FftPlan(std::size_t n, int sign, std::size_t n1 = 0) : n_(n1 > 0 ? n * n1 : n) {
    std::lock_guard lock(planner_mutex());
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    if (n1 > 0) {
      plan_ = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n1), buf_, buf_, sign, FFTW_ESTIMATE);
    } else {
      plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, sign, FFTW_ESTIMATE);
    }
  }
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buf_); }
  void execute() { fftw_execute(plan_); }
  std::size_t size() const { return n_; }

private:
  static std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
  }
  std::size_t n_;
  fftw_complex* buf_ = nullptr;
  fftw_plan plan_ = nullptr;
};

/// exp(i * theta * m^2 / 2) with the phase reduced in extended precision.
inline Complex chirp(long double theta, std::int64_t m) {
  constexpr long double two_pi = 6.283185307179586476925286766559005768L;
  const long double m2 = static_cast<long double>(m) * static_cast<long double>(m);
  long double phase = std::fmod(theta * m2 * 0.5L, two_pi);
  return std::polar(1.0, static_cast<double>(phase));
}

/// Chirp-z transform: X_k = sum_{j<N} x_j exp(i theta j k), k = 0..K-1
/// (Bluestein's identity jk = (j^2 + k^2 - (k-j)^2)/2, convolution by FFT).
inline std::vector<Complex> chirp_z(const std::vector<Complex>& x, std::size_t out_count, double theta) {
  const std::size_t n = x.size();
  std::size_t len = 1;
  while (len < n + out_count - 1) len <<= 1;
  const long double th = theta;

  FftPlan fa(len, FFTW_FORWARD);
  FftPlan fb(len, FFTW_FORWARD);
  FftPlan inv(len, FFTW_BACKWARD);
  Complex* a = fa.data();
  Complex* b = fb.data();
  for (std::size_t i = 0; i < len; ++i) a[i] = b[i] = 0.0;
  for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp(th, static_cast<std::int64_t>(j));
  // b[m] = exp(-i theta m^2 / 2), m in (-(n-1), out_count-1), stored cyclically
  for (std::size_t m = 0; m < out_count; ++m) b[m] = std::conj(chirp(th, static_cast<std::int64_t>(m)));
  for (std::size_t m = 1; m < n; ++m) b[len - m] = std::conj(chirp(th, static_cast<std::int64_t>(m)));
  fa.execute();
  fb.execute();
  Complex* c = inv.data();
  for (std::size_t i = 0; i < len; ++i) c[i] = a[i] * b[i];
  inv.execute();
  std::vector<Complex> out(out_count);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t k = 0; k < out_count; ++k) {
    out[k] = c[k] * scale * chirp(th, static_cast<std::int64_t>(k));
  }
  return out;
}

}  // namespace detail

/// Frequencies used by sample_spectrum. 1D: u_k = k * u_max / (count - 1),
/// k = 0..count-1. 2D: u = (k1, k2) * du with k1 in [0, count) and
/// k2 in (-count, count), du = u_max / (count - 1); the other half-plane is
/// the complex conjugate.
inline std::vector<double> spectrum_frequencies(int dim, double u_max, std::size_t count) {
  const double du = u_max / static_cast<double>(count - 1);
  std::vector<double> f;
  if (dim == 1) {
    f.resize(count);
    for (std::size_t k = 0; k < count; ++k) f[k] = static_cast<double>(k) * du;
    f.back() = u_max;
  } else {
    const auto c = static_cast<std::int64_t>(count);
    for (std::int64_t k1 = 0; k1 < c; ++k1) {
      for (std::int64_t k2 = -(c - 1); k2 < c; ++k2) {
        f.push_back(static_cast<double>(k1) * du);
        f.push_back(static_cast<double>(k2) * du);
      }
    }
  }
  return f;
}

/// Samples mu^ on the regular frequency grid of spectrum_frequencies().
///
/// direct: fourier_transform at every sample (any measure).
/// fast:   grid measures only; lattice sums evaluated with a chirp-z
///         transform per axis. Agrees with direct to ~1e-12 absolute.
inline Spectrum sample_spectrum(const Measure& m, double u_max, std::size_t count, SpectrumMode mode) {
  if (count < 2) throw DomainError("sample_spectrum: count must be >= 2");
  if (!(u_max > 0.0)) throw DomainError("sample_spectrum: u_max must be positive");
  Spectrum s;
  s.dim = dim(m);
  s.mass = mass(m);
  if (s.dim > 2) throw UnsupportedError("sample_spectrum: regular grids are defined for n <= 2");
  s.freqs = spectrum_frequencies(s.dim, u_max, count);
  const std::size_t samples = s.freqs.size() / static_cast<std::size_t>(s.dim);
  s.values.resize(samples);

  if (mode == SpectrumMode::direct) {
    parallel_for(samples, [&](std::size_t i) {
      s.values[i] = fourier_transform(m, std::span<const double>(s.freqs.data() + i * s.dim, s.dim));
    });
    return s;
  }

  const auto* g = std::get_if<GridMeasure>(&m);
  if (g == nullptr) {
    throw UnsupportedError("sample_spectrum: fast mode needs a grid measure (atomic measures have no lattice)");
  }
  const double h = g->spacing();
  const double du = u_max / static_cast<double>(count - 1);
  const double theta = du * h;
  const auto ext = g->extent();

  // Per-axis factor: exp(i u (origin + h/2)) sinc(u h / 2).
  auto axis_factor = [&](double u, int d) {
    return std::polar(1.0, u * (g->origin()[d] + 0.5 * h)) * detail::sinc(0.5 * u * h);
  };

  if (s.dim == 1) {
    std::vector<Complex> x(ext[0]);
    for (std::size_t j = 0; j < ext[0]; ++j) x[j] = g->weights()[j];
    const auto lattice = detail::chirp_z(x, count, theta);
    for (std::size_t k = 0; k < count; ++k) s.values[k] = lattice[k] * axis_factor(s.freqs[k], 0);
    return s;
  }

  // 2D: transform along axis 0 for every column, then along axis 1 with the
  // k2 range shifted to start at -(count - 1).
  const std::size_t k2count = 2 * count - 1;
  std::vector<std::vector<Complex>> stage(count, std::vector<Complex>(ext[1]));
  for (std::size_t j1 = 0; j1 < ext[1]; ++j1) {
    std::vector<Complex> col(ext[0]);
    for (std::size_t j0 = 0; j0 < ext[0]; ++j0) col[j0] = g->weight(j0, j1);
    const auto t = detail::chirp_z(col, count, theta);
    for (std::size_t k1 = 0; k1 < count; ++k1) stage[k1][j1] = t[k1];
  }
  const double shift = -static_cast<double>(count - 1);
  for (std::size_t k1 = 0; k1 < count; ++k1) {
    std::vector<Complex> row(ext[1]);
    for (std::size_t j1 = 0; j1 < ext[1]; ++j1) {
      // exp(i theta shift j1) folds the negative start of k2 into the weights
      const long double ph = static_cast<long double>(theta) * shift * static_cast<long double>(j1);
      row[j1] = stage[k1][j1] * std::polar(1.0, static_cast<double>(std::fmod(ph, 6.283185307179586476925286766559005768L)));
    }
    const auto t = detail::chirp_z(row, k2count, theta);
    for (std::size_t k2 = 0; k2 < k2count; ++k2) {
      const std::size_t i = k1 * k2count + k2;
      s.values[i] = t[k2] * axis_factor(s.freqs[2 * i], 0) * axis_factor(s.freqs[2 * i + 1], 1);
    }
  }
  return s;
}

}  // namespace riesz
