#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace riesz {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  /// Map to [a, b] and accumulate f(x) * w.
  template <typename F>
  double integrate(double a, double b, F&& f) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      s += weights[i] * f(mid + half * nodes[i]);
    }
    return s * half;
  }
};

namespace detail {
inline GaussRule compute_gauss_legendre(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}
}  // namespace detail

/// Cached n-point Gauss-Legendre rule (n >= 2).
inline const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  }
  return it->second;
}

/// One panel of a composite radial rule.
struct Panel {
  double lo;
  double hi;
};

/// Panels covering [lo, hi]: geometric (ratio 2) from lo up to `width`, then
/// uniform panels of at most `width`. Used wherever an integrable power
/// singularity sits at the left end and the integrand oscillates on scale
/// `width` further out.
inline std::vector<Panel> graded_panels(double lo, double hi, double width) {
  std::vector<Panel> out;
  double a = lo;
  while (a < hi && a < width) {
    const double b = std::min({2.0 * a, width, hi});
    out.push_back({a, b});
    a = b;
  }
  if (a < hi) {
    const auto count = static_cast<std::size_t>(std::ceil((hi - a) / width));
    const double step = (hi - a) / static_cast<double>(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double pa = a + step * static_cast<double>(k);
      const double pb = (k + 1 == count) ? hi : a + step * static_cast<double>(k + 1);
      out.push_back({pa, pb});
    }
  }
  return out;
}

}  // namespace riesz
