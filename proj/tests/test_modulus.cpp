#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "modlab/modulus.hpp"

using namespace modlab;

namespace {

Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

CurveFamily rectangle_family(int count) {
  CurveFamily fam;
  for (int i = 0; i < count; ++i) {
    const double y = (i + 0.5) / count;
    fam.curves.emplace_back(std::vector<Vec>{v2(0, y), v2(1, y)});
  }
  return fam;
}

}  // namespace

TEST_CASE("analytic ring modulus") {
  const double e = std::exp(1.0);
  CHECK(ring_modulus_analytic(2, 1, e) == doctest::Approx(2 * std::numbers::pi));
  CHECK(ring_modulus_analytic(3, 1, e) == doctest::Approx(4 * std::numbers::pi));
  CHECK(ring_modulus_analytic(2, 1, std::exp(10.0)) == doctest::Approx(0.2 * std::numbers::pi));
  // Scaling invariance of the ring.
  CHECK(ring_modulus_analytic(3, 0.2, 0.2 * e) == doctest::Approx(ring_modulus_analytic(3, 1, e)));
  CHECK_THROWS_AS(ring_modulus_analytic(2, 2, 1), InputError);
}

TEST_CASE("empty family has zero modulus") {
  const auto g = GridSpec::cube(v2(0, 0), v2(1, 1), 8);
  CHECK(discrete_modulus(CurveFamily{}, g, 2.0).value == 0.0);
}

TEST_CASE("rectangle modulus equals the side ratio") {
  const auto g = GridSpec::cube(v2(0, 0), v2(1, 1), 64);
  const auto r = discrete_modulus(rectangle_family(64), g, 2.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(0.05));
  CHECK(r.lower_bound <= r.value + 1e-12);
  CHECK(r.residual <= 1e-12);
  // A 2 x 1 rectangle crossed the long way: modulus 1/2.
  const auto g2 = GridSpec(v2(0, 0), v2(2, 1), {64, 32});
  CurveFamily long_way;
  for (int i = 0; i < 32; ++i)
    long_way.curves.emplace_back(std::vector<Vec>{v2(0, (i + 0.5) / 32), v2(2, (i + 0.5) / 32)});
  CHECK(discrete_modulus(long_way, g2, 2.0).value == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("single segment: the optimum spreads rho evenly along it") {
  const auto g = GridSpec::cube(v2(0, 0), v2(1, 1), 4);
  CurveFamily fam;
  fam.curves.emplace_back(std::vector<Vec>{v2(0, 0.1), v2(1, 0.1)});
  // rho = 1 on the 4 row cells of side 1/4: energy 4 * (1/16) = 1/4.
  const auto r = discrete_modulus(fam, g, 2.0, {.tol = 1e-8});
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.lower_bound == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("returned density is admissible for every curve") {
  const SphericalRing ring(Vec::Zero(2), 1.0, std::exp(1.0));
  const auto fam = generate_ring_family(ring, 128, RingFamilyKind::radial);
  const auto g = GridSpec::centered(Vec::Zero(2), std::exp(1.0), 64);
  const auto r = discrete_modulus(fam, g, 2.0, {.add_per_round = 8});
  for (const auto& c : fam.curves) CHECK(line_integral(r.density, c) >= 1.0 - 1e-9);
  CHECK(r.value == doctest::Approx(r.density.energy(2.0)).epsilon(1e-12));
  CHECK(r.lower_bound <= r.value * (1 + 1e-9));
  CHECK(r.family_size == 128);
}

TEST_CASE("threads do not change the result") {
  const SphericalRing ring(Vec::Zero(2), 1.0, 2.0);
  const auto fam = generate_ring_family(ring, 64, RingFamilyKind::spiral, 64);
  const auto g = GridSpec::centered(Vec::Zero(2), 2.0, 48);
  const auto a = discrete_modulus(fam, g, 2.0, {.threads = 1});
  const auto b = discrete_modulus(fam, g, 2.0, {.threads = 3});
  CHECK(a.value == b.value);
}

TEST_CASE("budget exhaustion reports the best upper bound") {
  const SphericalRing ring(Vec::Zero(2), 1.0, 2.0);
  const auto fam = generate_ring_family(ring, 256, RingFamilyKind::radial);
  const auto g = GridSpec::centered(Vec::Zero(2), 2.0, 64);
  try {
    discrete_modulus(fam, g, 2.0, {.max_iterations = 3});
    FAIL("expected SolverBudgetExceeded");
  } catch (const SolverBudgetExceeded& e) {
    CHECK(e.best_upper_bound() > 0.0);
  }
}

TEST_CASE("solver input validation") {
  const auto g = GridSpec::cube(v2(0, 0), v2(1, 1), 8);
  CHECK_THROWS_AS(discrete_modulus(rectangle_family(4), g, 1.0), InputError);
  CHECK_THROWS_AS(discrete_modulus(rectangle_family(4), g, 2.0, {.tol = 0.0}), InputError);
  CurveFamily outside;
  outside.curves.emplace_back(std::vector<Vec>{v2(0, 0), v2(2, 0)});
  CHECK_THROWS_AS(discrete_modulus(outside, g, 2.0), InputError);
}

TEST_CASE("three-dimensional ring modulus on a coarse grid") {
  const double e = std::exp(1.0);
  const SphericalRing ring(Vec::Zero(3), 1.0, e);
  const auto fam = generate_ring_family(ring, 1500, RingFamilyKind::radial);
  const auto g = GridSpec::centered(Vec::Zero(3), e, 32);
  const auto r = discrete_modulus(fam, g, 3.0, {.tol = 1e-2, .add_per_round = 64});
  // Coarse grid and sampled directions: only the order of magnitude is asserted.
  CHECK(r.value == doctest::Approx(4 * std::numbers::pi).epsilon(0.35));
}

TEST_CASE("density csv layout") {
  const auto g = GridSpec::cube(v2(0, 0), v2(1, 1), 2);
  std::ostringstream os;
  write_density_csv(os, GridDensity::constant(g, 0.5));
  std::istringstream is(os.str());
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "cell,x0,x1,rho");
  CHECK(row == "0,0.25,0.25,0.5");
}

TEST_CASE("eta functions and admissibility") {
  const double e = std::exp(1.0);
  const auto u = uniform_eta(1, 2);
  CHECK(u(1.5) == 1.0);
  CHECK(u(2.5) == 0.0);
  CHECK(uniform_eta(1, e)(2.0) == doctest::Approx(0.58198).epsilon(1e-5));
  auto c = admissible_check(u, 1, 2);
  CHECK(c.admissible);
  CHECK(c.integral == doctest::Approx(1.0));
  const auto zero = EtaFunction::piecewise({1, 2}, {0.0});
  c = admissible_check(zero, 1, 2);
  CHECK_FALSE(c.admissible);
  CHECK(c.integral == 0.0);
  c = admissible_check(EtaFunction::inverse_log(1, e), 1, e);
  CHECK(c.admissible);
  CHECK(std::abs(c.integral - 1.0) < 1e-10);
  c = admissible_check(EtaFunction::power_law(-0.5, 0.25, 0.5), 0.25, 0.5);
  CHECK(std::abs(c.integral - 1.0) < 1e-10);
  CHECK_THROWS_AS(EtaFunction::piecewise({1, 2}, {-1.0}), InputError);
  CHECK(u.describe() == "uniform(1,2)");
}

TEST_CASE("weighted rhs integral closed forms") {
  const Indicator all = [](const Vec&) { return true; };
  const ScalarField one = [](const Vec&) { return 1.0; };
  const ScalarField five = [](const Vec&) { return 5.0; };
  const SphericalRing a12(Vec::Zero(2), 1, 2);
  const double base = weighted_rhs_integral(one, uniform_eta(1, 2), a12, all, 2);
  CHECK(base == doctest::Approx(3 * std::numbers::pi).epsilon(1e-3));
  CHECK(weighted_rhs_integral(five, uniform_eta(1, 2), a12, all, 2) == doctest::Approx(5 * base).epsilon(1e-12));
  const double e = std::exp(1.0);
  const SphericalRing a1e(Vec::Zero(2), 1, e);
  CHECK(weighted_rhs_integral(one, EtaFunction::inverse_log(1, e), a1e, all, 2) ==
        doctest::Approx(2 * std::numbers::pi).epsilon(1e-2));
  // Half-plane mask halves the value.
  const Indicator upper = [](const Vec& y) { return y[1] > 0.0; };
  CHECK(weighted_rhs_integral(one, uniform_eta(1, 2), a12, upper, 2) ==
        doctest::Approx(1.5 * std::numbers::pi).epsilon(2e-3));
}

TEST_CASE("ring quadrature in three dimensions") {
  const SphericalRing ring(Vec::Zero(3), 1, 2);
  const auto q = integrate_over_ring([](const Vec&) { return 1.0; }, ring, [](const Vec&) { return true; }, 32);
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(4.0 / 3.0 * std::numbers::pi * 7).epsilon(2e-3));
}

TEST_CASE("blow-up family grows as the segments approach") {
  const auto a = blowup_family(0.5, 64);
  const auto b = blowup_family(0.25, 64);
  CHECK(b.size() > a.size());
  // Nested: every arc radius of the larger separation also appears for the smaller.
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.curves[i].front().isApprox(b.curves[i].front()));
  const double ma = blowup_experiment(0.5, 64, {.add_per_round = 16});
  const double mb = blowup_experiment(0.25, 64, {.add_per_round = 16});
  CHECK(mb >= ma);
  CHECK_THROWS_AS(blowup_family(-1.0, 64), InputError);
}
