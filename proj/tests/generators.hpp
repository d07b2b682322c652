#ifndef MODLAB_TESTS_GENERATORS_HPP
#define MODLAB_TESTS_GENERATORS_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "modlab/mappings.hpp"
#include "modlab/modulus.hpp"

namespace modlab::testing {

/// Small seeded generator for randomized instances.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
  Vec point(int n, double lo, double hi) {
    Vec v(n);
    for (int d = 0; d < n; ++d) v[d] = uniform(lo, hi);
    return v;
  }

  /// Polyline with `vertices` points inside the box [lo, hi]^2.
  Curve polyline(int vertices, double lo, double hi) {
    std::vector<Vec> pts;
    while (static_cast<int>(pts.size()) < vertices) {
      Vec p = point(2, lo, hi);
      if (pts.empty() || (p - pts.back()).norm() > 1e-6) pts.push_back(std::move(p));
    }
    return Curve(std::move(pts));
  }

  /// Polyline from inside B(c, 1) to outside B(c, 2) with radial oscillation.
  Curve crossing(const Vec& c) {
    const int m = integer(3, 8);
    const double t0 = uniform(0, 2 * std::numbers::pi);
    std::vector<Vec> pts;
    for (int i = 0; i < m; ++i) {
      double r = i == 0 ? uniform(0.1, 0.9) : i == m - 1 ? uniform(2.1, 2.9) : uniform(0.2, 2.9);
      const double t = t0 + uniform(-0.6, 0.6);
      pts.push_back(c + r * (Vec(2) << std::cos(t), std::sin(t)).finished());
    }
    return Curve(std::move(pts));
  }

  MappingSpec zoo_member(int n) {
    switch (integer(0, 4)) {
      case 0: return MappingSpec::identity(n);
      case 1: return MappingSpec::winding(integer(1, 6), n);
      case 2: return MappingSpec::radial_stretch(uniform(0.2, 4.0), n);
      case 3: return MappingSpec::inversion(n);
      default:
        return MappingSpec::composition({MappingSpec::winding(integer(1, 3), n),
                                         MappingSpec::radial_stretch(uniform(0.3, 3.0), n)});
    }
  }
};

struct SuiteOutcome {
  int instances = 0;
  int failures = 0;
  std::string first_failure;

  void record(bool ok, const std::string& what) {
    ++instances;
    if (ok) return;
    if (failures++ == 0) first_failure = what;
  }
};

/// M(subfamily) <= M(family), certified by lower(sub) <= value(full).
inline SuiteOutcome monotone_under_inclusion(std::uint64_t seed, int instances) {
  Gen g(seed);
  SuiteOutcome out;
  const auto grid = GridSpec::cube(Vec::Zero(2), Vec::Ones(2), 8);
  const SolverOptions opt{.tol = 1e-6};
  for (int i = 0; i < instances; ++i) {
    CurveFamily big;
    const int m = g.integer(2, 6);
    for (int j = 0; j < m; ++j) big.curves.push_back(g.polyline(g.integer(2, 4), 0.0, 1.0));
    CurveFamily small;
    small.curves.assign(big.curves.begin(), big.curves.begin() + g.integer(1, m - 1));
    const auto ms = discrete_modulus(small, grid, 2.0, opt);
    const auto mb = discrete_modulus(big, grid, 2.0, opt);
    out.record(ms.lower_bound <= mb.value * (1 + 1e-12) && ms.value <= mb.value * (1 + 1e-3),
               "instance " + std::to_string(i) + ": sub " + std::to_string(ms.value) + " > full " +
                   std::to_string(mb.value));
  }
  return out;
}

/// Curves crossing A(c, 1, 2) versus their extracted crossing subcurves:
/// M(curves) <= M(subcurves), and the subcurve optimum is admissible for the curves.
inline SuiteOutcome minorization_comparison(std::uint64_t seed, int instances) {
  Gen g(seed);
  SuiteOutcome out;
  for (int i = 0; i < instances; ++i) {
    const Vec c = g.point(2, -0.5, 0.5);
    const SphericalRing ring(c, 1.0, 2.0);
    CurveFamily fam;
    const int m = g.integer(1, 4);
    for (int j = 0; j < m; ++j) fam.curves.push_back(g.crossing(c));
    const auto rep = minorizes(fam, ring);
    if (!rep.holds) {
      out.record(false, "instance " + std::to_string(i) + ": no crossing subcurve");
      continue;
    }
    const auto grid = GridSpec::centered(c, 3.0, 12);
    const auto whole = discrete_modulus(fam, grid, 2.0, {.tol = 1e-6});
    const auto parts = discrete_modulus(rep.extracted, grid, 2.0, {.tol = 1e-6});
    bool ok = whole.lower_bound <= parts.value * (1 + 1e-12);
    for (const auto& curve : fam.curves) ok = ok && line_integral(parts.density, curve) >= 1.0 - 1e-9;
    out.record(ok, "instance " + std::to_string(i) + ": M(curves) " + std::to_string(whole.lower_bound) +
                       " > M(subcurves) " + std::to_string(parts.value));
  }
  return out;
}

/// The integral of uniform_eta(r1, r2) over (r1, r2) is one to 1e-12.
inline SuiteOutcome uniform_eta_exact(std::uint64_t seed, int instances) {
  Gen g(seed);
  SuiteOutcome out;
  for (int i = 0; i < instances; ++i) {
    const double r1 = std::exp(g.uniform(-8, 3));
    const double r2 = r1 * (1.0 + std::exp(g.uniform(-6, 4)));
    const auto c = admissible_check(uniform_eta(r1, r2), r1, r2);
    out.record(c.admissible && std::abs(c.integral - 1.0) <= 1e-12,
               "instance " + std::to_string(i) + ": integral " + std::to_string(c.integral));
  }
  return out;
}

/// K_O >= 1 for zoo maps (analytic and finite-difference) and random matrices.
inline SuiteOutcome distortion_at_least_one(std::uint64_t seed, int instances) {
  Gen g(seed);
  SuiteOutcome out;
  for (int i = 0; i < instances; ++i) {
    const int n = g.integer(2, 3);
    const auto f = g.zoo_member(n);
    Vec x = g.point(n, -0.7, 0.7);
    if (x.norm() < 1e-3 || x.norm() >= 1.0 || std::hypot(x[0], x[1]) < 1e-3) x = Vec::Constant(n, 0.3);
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) m(r, s) = g.uniform(-1, 1);
    const double a = distortion_at(f, x).k_o;
    const double d = distortion_at(f, x, FiniteDifferenceMode{1e-5}).k_o;
    const double r = distortion_from_matrix(m).k_o;
    out.record(a >= 1.0 - 1e-12 && d >= 1.0 - 1e-9 && r >= 1.0 - 1e-12,
               "instance " + std::to_string(i) + ": " + f.describe() + " K_O " + std::to_string(a));
  }
  return out;
}

}  // namespace modlab::testing

#endif  // MODLAB_TESTS_GENERATORS_HPP
