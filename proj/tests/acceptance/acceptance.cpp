// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "../oracles.hpp"
#include "riesz/riesz.hpp"

using namespace riesz;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

SpectralOptions cutoff(double u_max) {
  SpectralOptions o;
  o.u_max = u_max;
  return o;
}

Measure cantor(int depth, Representation r) { return cantor_measure(depth, 1.0 / 3.0, r); }

const double kEight3 = 8.0 / 3.0;

Outcome criterion1() {
  Outcome o;
  const auto p = RieszParams::make(0.5, 1);
  const Measure u = GridMeasure::uniform_interval();
  const double s = spatial_energy(u, p).value;
  const double f = spectral_energy(u, p, cutoff(1e4)).value;
  o.require(rel(s, kEight3) <= 1e-3, "spatial rel " + fmt("%.2e", rel(s, kEight3)));
  o.require(rel(f, kEight3) <= 1e-2, "spectral rel " + fmt("%.2e", rel(f, kEight3)));
  return o;
}

Outcome criterion2() {
  Outcome o;
  const double c = riesz_constant(RieszParams::make(0.5, 1));
  const double root = std::sqrt(2.0 * std::numbers::pi);
  o.require(std::abs(c - root) <= 1e-12, "c(0.5,1) err " + fmt("%.1e", std::abs(c - root)));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int n = 1 + i % 2;
    const double alpha = U(rng) * n;
    const double s = 0.5 + U(rng);
    const double ref = oracle::pairing_constant(alpha, n, s);
    worst = std::max(worst, rel(riesz_constant(RieszParams::make(alpha, n)), ref));
  }
  o.require(worst <= 1e-6, "pairing worst rel " + fmt("%.1e", worst));
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto p = RieszParams::make(0.5, 1);
  TheoremOptions t;
  t.spectral = cutoff(1e4);
  t.eps = 0.05;
  const auto a = theorem_check(GridMeasure::uniform_interval(), p, t);
  o.require(a.gap <= 1e-3, "uniform eps=0.05 rel " + fmt("%.2e", a.gap));
  t.eps = 0.02;
  const auto b = theorem_check(cantor(6, Representation::atomic), p, t);
  o.require(std::isfinite(b.lhs) && b.gap <= 1e-2, "atomic Cantor(6) eps=0.02 rel " + fmt("%.2e", b.gap));
  return o;
}

Outcome criterion4() {
  Outcome o;
  const auto rep = proof_bound_audit(RieszParams::make(0.5, 1));
  for (const char* name : {"nearest-point", "power-ratio", "mollified-kernel"}) {
    const auto* it = rep.find(name);
    o.require(it && it->violations == 0 && it->checks >= 1000,
              std::string(name) + " " + std::to_string(it ? it->violations : 0) + "/" +
                  std::to_string(it ? it->checks : 0));
  }
  const auto* printed = rep.find("mollified-kernel-printed");
  o.require(printed && printed->violations >= 1,
            "printed 2^-alpha violations " + std::to_string(printed ? printed->violations : 0));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const std::vector<int> depths{4, 5, 6, 7, 8, 9, 10};
  const double truth = std::log(2.0) / std::log(3.0);
  const auto c = capacitary_dimension([](int d) { return cantor(d, Representation::grid); }, depths, 1);
  o.require(!c.inconclusive && std::abs(c.value - truth) <= 0.05, "Cantor " + fmt("%.3f", c.value));
  const double at[1] = {0.0};
  const auto a = capacitary_dimension([&](int) { return Measure(AtomicMeasure::dirac(at)); }, depths, 1);
  o.require(a.value == 0.0, "atom " + fmt("%.3f", a.value));
  const auto u = capacitary_dimension([](int) { return Measure(GridMeasure::uniform_interval()); }, depths, 1);
  o.require(u.value >= 0.95, "uniform " + fmt("%.3f", u.value));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const auto u = fourier_decay_exponent(GridMeasure::uniform_interval(), 1e4);
  o.require(u.value >= 0.9, "uniform " + fmt("%.3f", u.value));
  const auto c = fourier_decay_exponent(cantor(12, Representation::atomic), 1e4);
  o.require(c.value <= 0.1, "Cantor(12) " + fmt("%.3f", c.value));
  const double at[1] = {0.0};
  const auto d = fourier_decay_exponent(AtomicMeasure::dirac(at), 1e4);
  o.require(d.value == 0.0, "delta " + fmt("%.3f", d.value));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto p = RieszParams::make(0.5, 1);
  const Measure cg = cantor(5, Representation::grid);

  // bilinearity
  bool bil = true;
  for (const auto& m : {Measure(GridMeasure::uniform_lattice(64)), cg}) {
    const Measure m2 = scale_mass(m, 2.0);
    bil = bil && spatial_energy(m2, p).value == 4.0 * spatial_energy(m, p).value;
    bil = bil && spectral_energy(m2, p, cutoff(1e3)).value == 4.0 * spectral_energy(m, p, cutoff(1e3)).value;
    const double a = spatial_energy(m, p).value;
    bil = bil && rel(spatial_energy(scale_mass(m, 10.0), p).value, 100.0 * a) <= 1e-13;
  }
  o.require(bil, "bilinearity");

  // translation
  const double shift[1] = {0.37};
  const double t0 = spectral_energy(cg, p, cutoff(1e3)).value;
  const double t1 = spectral_energy(translate(cg, shift), p, cutoff(1e3)).value;
  const bool trans = spatial_energy(translate(cg, shift), p).value == spatial_energy(cg, p).value && rel(t1, t0) <= 1e-9;
  o.require(trans, "translation");

  // positivity and alpha-monotonicity over seeded random grids
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  bool pos = true, mono = true;
  for (int k = 0; k < 8; ++k) {
    std::vector<double> w(40);
    for (auto& v : w) v = U(rng) < 0.3 ? 0.0 : U(rng);
    w[0] = 0.5;
    const GridMeasure g(1, {U(rng), 0.0}, 1.0 / 40.0, {40, 1}, std::move(w));
    pos = pos && spectral_energy(g, p, cutoff(500.0)).value >= 0.0 && spatial_energy(g, p).value > 0.0;
    double prev = 0.0;
    for (double a : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}) {
      const double v = spatial_energy(g, RieszParams::make(a, 1)).value;
      mono = mono && v >= prev;
      prev = v;
    }
  }
  o.require(pos, "positivity");
  o.require(mono, "alpha-monotone");

  // Parseval for two mollified atoms, relative to the overlap integral
  const double eps = 0.05;
  const auto phi = scale(bump_profile(1), eps);
  const double knot = eps * phi.axis_profile().spacing();
  double worst = 0.0;
  for (int k : {0, 300, 1500}) {
    const double d = k * knot;
    auto spectral = [&](double u) {
      const double v[1] = {u};
      const double t = phi.transform(v);
      return t * t * std::cos(u * d);
    };
    const double lhs = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                           spectral, 0.0, std::numbers::pi / knot, 12, 1e-12) /
                       std::numbers::pi;
    auto overlap = [&](double x) {
      const double x0[1] = {x};
      const double x1[1] = {x - d};
      return phi(x0) * phi(x1);
    };
    const double rhs = oracle::integrate(overlap, d - eps / 2.0, eps / 2.0, 1e-12);
    worst = std::max(worst, rel(lhs, rhs));
  }
  o.require(worst <= 1e-6, "Parseval rel " + fmt("%.1e", worst));

  // fast against direct spectrum
  double gap = 0.0;
  for (const auto& m : {cantor(6, Representation::grid), Measure(GridMeasure::uniform_lattice(1000))}) {
    const auto d = sample_spectrum(m, 500.0, 300, SpectrumMode::direct);
    const auto f = sample_spectrum(m, 500.0, 300, SpectrumMode::fast);
    for (std::size_t i = 0; i < d.size(); ++i) gap = std::max(gap, std::abs(d.values[i] - f.values[i]));
  }
  o.require(gap <= 1e-10, "fast-vs-direct " + fmt("%.1e", gap));
  return o;
}

Outcome criterion8() {
  Outcome o;
  const auto rows = bench_energy({std::size_t{1} << 10, std::size_t{1} << 12, std::size_t{1} << 14}, RieszParams::make(0.5, 1));
  std::printf("    %8s %20s %10s %20s %10s %10s %10s\n", "cells", "spatial", "t_spatial", "spectral", "t_spectral", "gap",
              "tolerance");
  for (const auto& r : rows) {
    std::printf("    %8zu %20.15f %9.3fs %20.15f %9.3fs %10.2e %10.2e\n", r.cells, r.spatial, r.spatial_seconds, r.spectral,
                r.spectral_seconds, r.gap, r.tolerance);
    o.require(r.agree, "N=" + std::to_string(r.cells));
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double budget;  // seconds; 0 = no limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {1, "energy identity, uniform [0,1]", 10.0, criterion1},
      {2, "Riesz constant and Gaussian pairing", 30.0, criterion2},
      {3, "mollified spatial vs spectral", 60.0, criterion3},
      {4, "proof-bound audit", 60.0, criterion4},
      {5, "capacitary dimension", 300.0, criterion5},
      {6, "Fourier decay exponent", 60.0, criterion6},
      {7, "property suites", 0.0, criterion7},
      {8, "benchmark agreement", 0.0, criterion8},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget > 0.0) o.require(secs <= c.budget, "time " + fmt("%.1fs", secs) + " <= " + fmt("%.0fs", c.budget));
    else o.detail += "; time " + fmt("%.1fs", secs);
    std::printf("criterion %d %s: %s (%s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
