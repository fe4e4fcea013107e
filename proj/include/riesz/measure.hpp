#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "riesz/error.hpp"

namespace riesz {

using Complex = std::complex<double>;

/// Finite weighted point set in R^n (n >= 1). Weights are nonnegative.
class AtomicMeasure {
public:
  AtomicMeasure() = default;

  /// `coords` holds the points row by row (size = count * dim).
  AtomicMeasure(int dim, std::vector<double> coords, std::vector<double> weights)
      : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
    if (dim_ < 1) throw DomainError("atomic measure: dimension must be >= 1");
    if (coords_.size() != weights_.size() * static_cast<std::size_t>(dim_)) {
      throw DomainError("atomic measure: coordinate count does not match weights");
    }
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("atomic measure: weights must be finite and >= 0");
    }
    for (double c : coords_) {
      if (!std::isfinite(c)) throw DomainError("atomic measure: coordinates must be finite");
    }
  }

  static AtomicMeasure dirac(std::span<const double> at, double weight = 1.0) {
    return AtomicMeasure(static_cast<int>(at.size()), {at.begin(), at.end()}, {weight});
  }

  int dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& coords() const { return coords_; }
  const std::vector<double>& weights() const { return weights_; }

  double mass() const {
    double m = 0.0;
    for (double w : weights_) m += w;
    return m;
  }

  bool operator==(const AtomicMeasure&) const = default;

private:
  int dim_ = 1;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

/// Piecewise-constant density on a rectangular lattice of square cells,
/// n in {1, 2}. Cell (i0, i1) covers origin + h * [i0, i0+1] x [i1, i1+1]
/// and carries mass weight(i0, i1); its density is weight / h^n.
class GridMeasure {
public:
  GridMeasure() = default;

  GridMeasure(int dim, std::array<double, 2> origin, double spacing,
              std::array<std::size_t, 2> extent, std::vector<double> weights)
      : dim_(dim), origin_(origin), spacing_(spacing), extent_(extent), weights_(std::move(weights)) {
    if (dim_ != 1 && dim_ != 2) throw DomainError("grid measure: dimension must be 1 or 2");
    if (dim_ == 1) {
      extent_[1] = 1;
      origin_[1] = 0.0;
    }
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) throw DomainError("grid measure: spacing must be positive");
    if (extent_[0] == 0 || extent_[1] == 0) throw DomainError("grid measure: empty lattice");
    if (weights_.size() != extent_[0] * extent_[1]) {
      throw DomainError("grid measure: weight count does not match lattice extent");
    }
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      const double w = weights_[k];
      if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("grid measure: cell weights must be finite and >= 0");
      if (w > 0.0) nonzero_.push_back(static_cast<std::uint32_t>(k));
    }
    if (nonzero_.empty()) throw DomainError("grid measure: total mass must be positive");
  }

  /// Uniform probability density on [a, b] (one cell).
  static GridMeasure uniform_interval(double a = 0.0, double b = 1.0) {
    return GridMeasure(1, {a, 0.0}, b - a, {1, 1}, {1.0});
  }

  /// Uniform probability density on [0, 1] split into `cells` equal cells.
  static GridMeasure uniform_lattice(std::size_t cells) {
    return GridMeasure(1, {0.0, 0.0}, 1.0 / static_cast<double>(cells), {cells, 1},
                       std::vector<double>(cells, 1.0 / static_cast<double>(cells)));
  }

  /// Uniform probability density on the square [0, side]^2 split into cells^2 cells.
  static GridMeasure uniform_square(std::size_t cells, double side = 1.0) {
    const double c = static_cast<double>(cells);
    return GridMeasure(2, {0.0, 0.0}, side / c, {cells, cells},
                       std::vector<double>(cells * cells, 1.0 / (c * c)));
  }

  int dim() const { return dim_; }
  double spacing() const { return spacing_; }
  const std::array<double, 2>& origin() const { return origin_; }
  const std::array<std::size_t, 2>& extent() const { return extent_; }
  std::size_t cell_count() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  /// Flat (row-major) indices of cells with positive weight, ascending.
  const std::vector<std::uint32_t>& nonzero() const { return nonzero_; }

  double weight(std::size_t i0, std::size_t i1 = 0) const { return weights_[i0 * extent_[1] + i1]; }
  std::array<std::size_t, 2> unflatten(std::size_t k) const { return {k / extent_[1], k % extent_[1]}; }

  /// Lower corner of cell k along axis d.
  double cell_lower(std::size_t k, int d) const {
    const auto idx = unflatten(k);
    return origin_[d] + spacing_ * static_cast<double>(idx[d]);
  }
  double cell_center(std::size_t k, int d) const {
    const auto idx = unflatten(k);
    return origin_[d] + spacing_ * (static_cast<double>(idx[d]) + 0.5);
  }

  double mass() const {
    double m = 0.0;
    for (double w : weights_) m += w;
    return m;
  }

  bool operator==(const GridMeasure& o) const {
    return dim_ == o.dim_ && origin_ == o.origin_ && spacing_ == o.spacing_ && extent_ == o.extent_ &&
           weights_ == o.weights_;
  }

private:
  int dim_ = 1;
  std::array<double, 2> origin_{0.0, 0.0};
  double spacing_ = 1.0;
  std::array<std::size_t, 2> extent_{1, 1};
  std::vector<double> weights_;
  std::vector<std::uint32_t> nonzero_;
};

using Measure = std::variant<AtomicMeasure, GridMeasure>;

inline int dim(const Measure& m) {
  return std::visit([](const auto& x) { return x.dim(); }, m);
}

inline double mass(const Measure& m) {
  return std::visit([](const auto& x) { return x.mass(); }, m);
}

/// Axis-aligned bounding box of the support: {lo0, hi0, lo1, hi1}.
inline std::array<double, 4> bounding_box(const Measure& m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::array<double, 4> box{inf, -inf, inf, -inf};
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    for (std::size_t i = 0; i < a->size(); ++i) {
      if (a->weight(i) <= 0.0) continue;
      for (int d = 0; d < std::min(a->dim(), 2); ++d) {
        box[2 * d] = std::min(box[2 * d], a->point(i)[d]);
        box[2 * d + 1] = std::max(box[2 * d + 1], a->point(i)[d]);
      }
    }
  } else {
    const auto& g = std::get<GridMeasure>(m);
    for (auto k : g.nonzero()) {
      for (int d = 0; d < g.dim(); ++d) {
        box[2 * d] = std::min(box[2 * d], g.cell_lower(k, d));
        box[2 * d + 1] = std::max(box[2 * d + 1], g.cell_lower(k, d) + g.spacing());
      }
    }
  }
  if (dim(m) == 1) {
    box[2] = box[3] = 0.0;
  }
  return box;
}

/// Diameter of the support (exact for atomic measures in any dimension,
/// bounding-box diagonal for grids).
inline double support_diameter(const Measure& m) {
  if (const auto* a = std::get_if<AtomicMeasure>(&m); a && a->dim() > 2) {
    double best = 0.0;
    for (std::size_t i = 0; i < a->size(); ++i) {
      for (std::size_t j = i + 1; j < a->size(); ++j) {
        double s = 0.0;
        for (int d = 0; d < a->dim(); ++d) {
          const double t = a->point(i)[d] - a->point(j)[d];
          s += t * t;
        }
        best = std::max(best, std::sqrt(s));
      }
    }
    return best;
  }
  const auto b = bounding_box(m);
  return std::hypot(b[1] - b[0], b[3] - b[2]);
}

namespace detail {
/// sin(t)/t with the removable singularity handled.
inline double sinc(double t) {
  if (std::abs(t) < 1e-4) {
    const double t2 = t * t;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(t) / t;
}
}  // namespace detail

/// mu^(u) = int e^{i u.x} dmu(x).
///
/// Atomic measures: the weighted exponential sum. Grid measures: each cell is
/// integrated in closed form (exponential at the cell centre times a product of
/// sinc factors), so the result is exact for the piecewise-constant density.
inline Complex fourier_transform(const AtomicMeasure& m, std::span<const double> u) {
  if (u.size() != static_cast<std::size_t>(m.dim())) throw DomainError("fourier_transform: frequency dimension mismatch");
  double re = 0.0;
  double im = 0.0;
  const int n = m.dim();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto x = m.point(i);
    double phase = 0.0;
    for (int d = 0; d < n; ++d) phase += u[d] * x[d];
    re += m.weight(i) * std::cos(phase);
    im += m.weight(i) * std::sin(phase);
  }
  return {re, im};
}

inline Complex fourier_transform(const GridMeasure& m, std::span<const double> u) {
  if (u.size() != static_cast<std::size_t>(m.dim())) throw DomainError("fourier_transform: frequency dimension mismatch");
  const double h = m.spacing();
  double envelope = 1.0;
  for (int d = 0; d < m.dim(); ++d) envelope *= detail::sinc(0.5 * u[d] * h);
  double re = 0.0;
  double im = 0.0;
  if (m.dim() == 1) {
    const double base = m.origin()[0] + 0.5 * h;
    for (auto k : m.nonzero()) {
      const double phase = u[0] * (base + h * static_cast<double>(k));
      const double w = m.weights()[k];
      re += w * std::cos(phase);
      im += w * std::sin(phase);
    }
  } else {
    for (auto k : m.nonzero()) {
      const double phase = u[0] * m.cell_center(k, 0) + u[1] * m.cell_center(k, 1);
      const double w = m.weights()[k];
      re += w * std::cos(phase);
      im += w * std::sin(phase);
    }
  }
  return {re * envelope, im * envelope};
}

inline Complex fourier_transform(const Measure& m, std::span<const double> u) {
  return std::visit([&](const auto& x) { return fourier_transform(x, u); }, m);
}

/// Pushforward under x -> -x.
inline AtomicMeasure reflect(const AtomicMeasure& m) {
  std::vector<double> c(m.coords().size());
  std::transform(m.coords().begin(), m.coords().end(), c.begin(), [](double v) { return -v; });
  return AtomicMeasure(m.dim(), std::move(c), m.weights());
}

inline GridMeasure reflect(const GridMeasure& m) {
  const auto ext = m.extent();
  std::vector<double> w(m.cell_count());
  for (std::size_t i0 = 0; i0 < ext[0]; ++i0) {
    for (std::size_t i1 = 0; i1 < ext[1]; ++i1) {
      w[(ext[0] - 1 - i0) * ext[1] + (ext[1] - 1 - i1)] = m.weight(i0, i1);
    }
  }
  std::array<double, 2> origin{-(m.origin()[0] + m.spacing() * static_cast<double>(ext[0])), 0.0};
  if (m.dim() == 2) origin[1] = -(m.origin()[1] + m.spacing() * static_cast<double>(ext[1]));
  return GridMeasure(m.dim(), origin, m.spacing(), ext, std::move(w));
}

inline Measure reflect(const Measure& m) {
  return std::visit([](const auto& x) -> Measure { return reflect(x); }, m);
}

/// Translate the measure by the vector `a`.
inline Measure translate(const Measure& m, std::span<const double> a) {
  if (const auto* at = std::get_if<AtomicMeasure>(&m)) {
    std::vector<double> c = at->coords();
    for (std::size_t i = 0; i < at->size(); ++i) {
      for (int d = 0; d < at->dim(); ++d) c[i * at->dim() + d] += a[d];
    }
    return AtomicMeasure(at->dim(), std::move(c), at->weights());
  }
  const auto& g = std::get<GridMeasure>(m);
  std::array<double, 2> o = g.origin();
  for (int d = 0; d < g.dim(); ++d) o[d] += a[d];
  return GridMeasure(g.dim(), o, g.spacing(), g.extent(), g.weights());
}

/// c * mu for c > 0.
inline Measure scale_mass(const Measure& m, double c) {
  if (!(c > 0.0)) throw DomainError("scale_mass: factor must be positive");
  auto scaled = [c](std::vector<double> w) {
    for (double& v : w) v *= c;
    return w;
  };
  if (const auto* at = std::get_if<AtomicMeasure>(&m)) {
    return AtomicMeasure(at->dim(), at->coords(), scaled(at->weights()));
  }
  const auto& g = std::get<GridMeasure>(m);
  return GridMeasure(g.dim(), g.origin(), g.spacing(), g.extent(), scaled(g.weights()));
}

enum class Representation { atomic, grid };

/// Depth-k approximation of the symmetric self-similar (Cantor-type) measure
/// on [0, 1] with contraction ratio r: at every level each interval keeps its
/// two end pieces of relative length r and gives each half the mass.
///
/// atomic: 2^k atoms of weight 2^-k at the midpoints of the level-k intervals.
/// grid:   uniform density on each level-k interval, on a lattice of spacing
///         r^k (requires 1/r to be an integer so the intervals align with cells).
inline Measure cantor_measure(int depth, double ratio, Representation rep) {
  if (depth < 0) throw DomainError("cantor_measure: depth must be >= 0");
  if (!(ratio > 0.0 && ratio <= 0.5)) throw DomainError("cantor_measure: ratio must lie in (0, 1/2]");
  if (rep == Representation::atomic) {
    if (depth > 24) throw ResolutionError("cantor_measure: atomic depth limited to 24");
    std::vector<double> left{0.0};
    double len = 1.0;
    for (int k = 0; k < depth; ++k) {
      const double shift = (1.0 - ratio) * len;
      const std::size_t cur = left.size();
      left.reserve(2 * cur);
      for (std::size_t i = 0; i < cur; ++i) left.push_back(left[i] + shift);
      len *= ratio;
    }
    for (double& x : left) x += 0.5 * len;
    const double w = std::ldexp(1.0, -depth);
    std::vector<double> weights(left.size(), w);
    return AtomicMeasure(1, std::move(left), std::move(weights));
  }
  const double inv = 1.0 / ratio;
  const double m = std::round(inv);
  if (std::abs(inv - m) > 1e-9 * inv) {
    throw ResolutionError("cantor_measure: grid representation needs 1/ratio to be an integer");
  }
  const auto base = static_cast<std::uint64_t>(m);
  std::uint64_t cells = 1;
  for (int k = 0; k < depth; ++k) {
    cells *= base;
    if (cells > (std::uint64_t{1} << 26)) {
      throw ResolutionError("cantor_measure: grid resolution overflow (more than 2^26 cells)");
    }
  }
  std::vector<std::uint64_t> idx{0};
  std::uint64_t stride = cells;
  for (int k = 0; k < depth; ++k) {
    stride /= base;
    const std::size_t cur = idx.size();
    for (std::size_t i = 0; i < cur; ++i) idx.push_back(idx[i] + (base - 1) * stride);
  }
  std::vector<double> weights(cells, 0.0);
  const double w = std::ldexp(1.0, -depth);
  for (auto i : idx) weights[i] = w;
  return GridMeasure(1, {0.0, 0.0}, 1.0 / static_cast<double>(cells), {cells, 1}, std::move(weights));
}

}  // namespace riesz
