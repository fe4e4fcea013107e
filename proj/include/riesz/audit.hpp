#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "riesz/energy.hpp"

namespace riesz {

/// One row of a check report: two computed quantities, their relative gap
/// and the tolerance it was held to.
struct CheckResult {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct TheoremOptions {
  SpectralOptions spectral;
  /// Relative margin added to the combined error estimates.
  double margin = 1e-2;
  /// Mollified mode: compare the psi_eps energy with the phi_eps-weighted
  /// spectral integral instead of the plain pair.
  std::optional<double> eps;
};

/// Spatial versus spectral energy for one measure. Passes when the relative
/// gap is within margin + (combined error estimates) / |spatial|. Both sides
/// divergent counts as agreement; exactly one side divergent is a failure.
inline CheckResult theorem_check(const Measure& m, const RieszParams& p, const TheoremOptions& opt = {}) {
  EnergyEstimate lhs, rhs;
  CheckResult r;
  if (opt.eps) {
    const Mollifier phi = scale(bump_profile(p.n), *opt.eps);
    lhs = mollified_energy(m, p, self_convolve(phi));
    rhs = mollified_spectral_energy(m, p, phi, opt.spectral);
    r.name = "mollified-theorem";
  } else {
    lhs = spatial_energy(m, p);
    rhs = spectral_energy(m, p, opt.spectral);
    r.name = "theorem";
  }
  r.lhs = lhs.value;
  r.rhs = rhs.value;
  if (lhs.divergent || rhs.divergent) {
    r.pass = lhs.divergent && rhs.divergent;
    r.gap = r.pass ? 0.0 : std::numeric_limits<double>::infinity();
    r.tolerance = opt.margin;
    r.note = r.pass ? "both divergent" : "incomparable: one side divergent";
    return r;
  }
  const double scale_v = std::max(std::abs(lhs.value), std::numeric_limits<double>::min());
  r.gap = std::abs(lhs.value - rhs.value) / scale_v;
  r.tolerance = opt.margin + (lhs.error() + rhs.error()) / scale_v;
  r.pass = r.gap <= r.tolerance;
  return r;
}

/// Outcome of one family of randomized or gridded checks.
struct AuditItem {
  std::string name;
  std::size_t checks = 0;
  std::size_t violations = 0;
  double worst = 0.0;  ///< largest observed value of the checked quantity
  double bound = 0.0;  ///< the bound it was compared with
};

struct AuditOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double eps = 0.01;
  std::size_t grid = 200;
  double tolerance = 1e-9;
  /// Mollification scales for the split-bound item (n = 1 only).
  std::vector<double> split_eps{0.1, 0.05, 0.02};
};

struct AuditReport {
  std::vector<AuditItem> items;
  /// For alpha > 1: the largest beta in [0, 1/2] with (1 - beta)^-alpha <= 1 + 2 beta.
  std::vector<std::pair<double, double>> frontier;

  const AuditItem* find(const std::string& name) const {
    for (const auto& it : items) {
      if (it.name == name) return &it;
    }
    return nullptr;
  }
};

namespace detail {

template <typename F>
double golden_min(F&& f, double a, double b, double& arg) {
  constexpr double r = 0.6180339887498949;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  arg = 0.5 * (a + b);
  return f(arg);
}

/// min over |u| <= eps of |z - u| found by search (no use of the closed form).
inline double ball_distance_search(std::span<const double> z, double eps) {
  if (z.size() == 1) {
    double u = 0.0;
    return golden_min([&](double t) { return std::abs(z[0] - t); }, -eps, eps, u);
  }
  auto dist = [&](double rho, double th) { return std::hypot(z[0] - rho * std::cos(th), z[1] - rho * std::sin(th)); };
  // coarse polar scan, then alternating golden-section refinement
  double best = std::numeric_limits<double>::infinity(), br = 0.0, bt = 0.0;
  constexpr int nr = 16, nt = 720;
  for (int i = 0; i <= nr; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double rho = eps * i / nr;
      const double th = 2.0 * std::numbers::pi * j / nt;
      const double v = dist(rho, th);
      if (v < best) {
        best = v;
        br = rho;
        bt = th;
      }
    }
  }
  const double dt = 2.0 * std::numbers::pi / nt;
  for (int round = 0; round < 6; ++round) {
    golden_min([&](double th) { return dist(br, th); }, bt - dt, bt + dt, bt);
    best = golden_min([&](double rho) { return dist(rho, bt); }, 0.0, eps, br);
  }
  return best;
}

/// int |t|^-alpha 1{|t| < r} against the tent offset density of two cells
/// of width h whose lower ends differ by d h (n = 1).
inline double truncated_pair_mean(double d, double h, double r, double alpha) {
  const double c = d * h;
  const double ih2 = 1.0 / (h * h);
  double s = 0.0;
  auto piece = [&](double t0, double t1, double a, double b) {
    t0 = std::max(t0, -r);
    t1 = std::min(t1, r);
    if (t1 > t0) s += linear_times_power(t0, t1, a, b, alpha);
  };
  piece(c - h, c, (h - c) * ih2, ih2);
  piece(c, c + h, (h + c) * ih2, -ih2);
  return s;
}

/// int int_{|x-y| < r} |x - y|^-alpha dmu dmu for a 1D grid measure.
inline double truncated_energy_1d(const GridMeasure& g, const RieszParams& p, double r) {
  const std::size_t E = g.extent()[0];
  std::vector<double> t(E), z(E, 0.0);
  for (std::size_t d = 0; d < E; ++d) t[d] = truncated_pair_mean(static_cast<double>(d), g.spacing(), r, p.alpha);
  return pair_sum(g, t, z).first;
}

}  // namespace detail

/// Numerical audit of the inequalities used in the energy identity proof.
///
///   nearest-point        |z - u| >= |z| - eps for |u| <= eps < |z|, by direct search
///   power-ratio          (1 - beta)^-alpha <= 1 + 2 beta on alpha in (0, 1], beta in [0, 1/2]
///   power-ratio-beyond   same for alpha in (1, 2] (fails; see frontier)
///   mollified-kernel     (k * psi_eps)(z) <= 2^alpha k(z) for |z| > 2 eps
///   mollified-kernel-printed   same against 2^-alpha (expected to fail)
///   split-bound          I(k * psi_eps) <= (1 + 2 sqrt eps) I + (1 - sqrt eps)^-alpha I_{<sqrt eps}
inline AuditReport proof_bound_audit(const RieszParams& p, const AuditOptions& opt = {}) {
  AuditReport rep;
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = p.n;
  auto random_direction = [&](double* out) {
    if (n == 1) {
      out[0] = unif(rng) < 0.5 ? -1.0 : 1.0;
      return;
    }
    const double th = 2.0 * std::numbers::pi * unif(rng);
    out[0] = std::cos(th);
    out[1] = std::sin(th);
  };
  if (n > 2) throw UnsupportedError("proof_bound_audit: implemented for n <= 2");
  if (opt.trials < 1000) throw DomainError("proof_bound_audit: trials must be at least 1000");

  {
    AuditItem it{"nearest-point", 0, 0, 0.0, opt.tolerance};
    for (std::size_t k = 0; k < opt.trials; ++k) {
      const double eps = 0.25 * unif(rng) + 1e-6;
      const double len = eps + (2.0 - eps) * unif(rng) + 1e-9;
      double z[2];
      random_direction(z);
      for (int d = 0; d < n; ++d) z[d] *= len;
      const double found = detail::ball_distance_search(std::span<const double>(z, static_cast<std::size_t>(n)), eps);
      const double dev = std::abs(found - (len - eps));
      ++it.checks;
      it.worst = std::max(it.worst, dev);
      if (dev > opt.tolerance) ++it.violations;
    }
    rep.items.push_back(it);
  }

  {
    AuditItem in{"power-ratio", 0, 0, 0.0, 0.0};
    AuditItem out{"power-ratio-beyond", 0, 0, 0.0, 0.0};
    const std::size_t G = std::max<std::size_t>(opt.grid, 2);
    for (std::size_t i = 0; i < G; ++i) {
      for (std::size_t j = 0; j < G; ++j) {
        const double beta = 0.5 * static_cast<double>(j) / static_cast<double>(G - 1);
        const double a_in = static_cast<double>(i + 1) / static_cast<double>(G);
        const double a_out = 1.0 + a_in;
        const double lhs_in = std::pow(1.0 - beta, -a_in);
        const double lhs_out = std::pow(1.0 - beta, -a_out);
        const double rhs = 1.0 + 2.0 * beta;
        ++in.checks;
        ++out.checks;
        in.worst = std::max(in.worst, lhs_in - rhs);
        out.worst = std::max(out.worst, lhs_out - rhs);
        if (lhs_in > rhs * (1.0 + 1e-15)) ++in.violations;
        if (lhs_out > rhs * (1.0 + 1e-15)) ++out.violations;
      }
    }
    rep.items.push_back(in);
    rep.items.push_back(out);
    for (int i = 1; i <= 20; ++i) {
      const double a = 1.0 + 0.05 * i;
      // 1 + 2 beta - (1 - beta)^-a is concave, zero at 0, positive just after
      double lo = 0.0, hi = 0.5;
      auto h = [&](double b) { return 1.0 + 2.0 * b - std::pow(1.0 - b, -a); };
      if (h(hi) >= 0.0) {
        rep.frontier.emplace_back(a, hi);
        continue;
      }
      lo = std::min(1e-3, 0.5 * (2.0 - a) / (a * (a + 1.0)));
      while (h(lo) < 0.0 && lo > 1e-300) lo *= 0.5;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) >= 0.0 ? lo : hi) = mid;
      }
      rep.frontier.emplace_back(a, lo);
    }
  }

  {
    const Mollifier psi = self_convolve(scale(bump_profile(n), opt.eps));
    const double bound = std::pow(2.0, p.alpha);
    const double printed = std::pow(2.0, -p.alpha);
    AuditItem good{"mollified-kernel", 0, 0, 0.0, bound};
    AuditItem bad{"mollified-kernel-printed", 0, 0, 0.0, printed};
    const std::size_t trials = n == 1 ? opt.trials : std::min<std::size_t>(opt.trials, 200);
    std::vector<std::array<double, 2>> zs(trials);
    for (auto& z : zs) {
      random_direction(z.data());
      const double len = 2.0 * opt.eps + (1.0 - 2.0 * opt.eps) * unif(rng) + 1e-12;
      for (int d = 0; d < n; ++d) z[d] *= len;
    }
    std::vector<double> ratio(trials);
    parallel_for(trials, [&](std::size_t k) {
      const auto& z = zs[k];
      const double len = n == 1 ? std::abs(z[0]) : std::hypot(z[0], z[1]);
      ratio[k] = kernel_convolve(p, psi, std::span<const double>(z.data(), static_cast<std::size_t>(n))) / p.kernel(len);
    });
    for (double q : ratio) {
      ++good.checks;
      ++bad.checks;
      good.worst = std::max(good.worst, q);
      bad.worst = std::max(bad.worst, q);
      if (q > bound * (1.0 + opt.tolerance)) ++good.violations;
      if (q > printed * (1.0 + opt.tolerance)) ++bad.violations;
    }
    rep.items.push_back(good);
    rep.items.push_back(bad);
  }

  if (n == 1) {
    AuditItem it{"split-bound", 0, 0, 0.0, 1.0};
    const std::vector<Measure> family{GridMeasure::uniform_interval(), cantor_measure(5, 1.0 / 3.0, Representation::grid)};
    for (const auto& m : family) {
      const auto& g = std::get<GridMeasure>(m);
      const double full = spatial_energy(m, p).value;
      for (double eps : opt.split_eps) {
        const double se = std::sqrt(eps);
        const auto moll = mollified_energy(m, p, self_convolve(scale(bump_profile(1), eps)));
        const double rhs = (1.0 + 2.0 * se) * full + std::pow(1.0 - se, -p.alpha) * detail::truncated_energy_1d(g, p, se);
        const double q = moll.value / rhs;
        ++it.checks;
        it.worst = std::max(it.worst, q);
        if (q > 1.0 + opt.tolerance) ++it.violations;
      }
    }
    rep.items.push_back(it);
  }
  return rep;
}

struct BenchRow {
  std::size_t cells = 0;
  double spatial = 0.0;
  double spatial_seconds = 0.0;
  double spectral = 0.0;
  double spectral_seconds = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool agree = false;
};

/// Times the direct O(N^2) spatial pair sum against the FFT-backed spectral
/// path on the uniform density of [0, 1] split into N cells.
inline std::vector<BenchRow> bench_energy(const std::vector<std::size_t>& sizes, const RieszParams& p,
                                          const TheoremOptions& opt = {}) {
  if (p.n != 1) throw UnsupportedError("bench_energy: runs on 1D lattices");
  std::vector<BenchRow> rows;
  using clock = std::chrono::steady_clock;
  for (std::size_t N : sizes) {
    if (N == 0) throw DomainError("bench_energy: sizes must be positive");
    const Measure m = GridMeasure::uniform_lattice(N);
    BenchRow r;
    r.cells = N;
    auto t0 = clock::now();
    const auto a = spatial_energy(m, p);
    auto t1 = clock::now();
    SpectralOptions so = opt.spectral;
    so.path = SpectralPath::fast;
    const auto b = spectral_energy(m, p, so);
    auto t2 = clock::now();
    r.spatial = a.value;
    r.spectral = b.value;
    r.spatial_seconds = std::chrono::duration<double>(t1 - t0).count();
    r.spectral_seconds = std::chrono::duration<double>(t2 - t1).count();
    r.gap = std::abs(a.value - b.value) / std::abs(a.value);
    r.tolerance = opt.margin + (a.error() + b.error()) / std::abs(a.value);
    r.agree = r.gap <= r.tolerance;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace riesz
