#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "modlab/curves.hpp"

using namespace modlab;

namespace {

Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

/// Every parameter where the polyline meets a sphere, by bisection on a fine scan.
std::vector<double> brute_force_crossings(const Curve& c, double radius) {
  std::vector<double> out;
  const int steps = 20000;
  const double top = static_cast<double>(c.size() - 1);
  auto g = [&](double u) { return c.at(u).norm() - radius; };
  for (int i = 0; i < steps; ++i) {
    double a = top * i / steps, b = top * (i + 1) / steps;
    if (g(a) == 0.0) out.push_back(a);
    if ((g(a) < 0) != (g(b) < 0) && g(b) != 0.0) {
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        ((g(a) < 0) == (g(m) < 0) ? a : b) = m;
      }
      out.push_back(0.5 * (a + b));
    }
  }
  return out;
}

Curve zigzag(std::mt19937_64& rng, double r_start, double r_end, int vertices) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi), wobble(-0.7, 0.7);
  std::vector<Vec> pts;
  const double t0 = angle(rng);
  for (int i = 0; i < vertices; ++i) {
    const double s = static_cast<double>(i) / (vertices - 1);
    double r = r_start + (r_end - r_start) * s;
    if (i > 0 && i + 1 < vertices) r += wobble(rng);
    r = std::max(r, 0.05);
    const double t = t0 + 0.3 * wobble(rng);
    pts.push_back(v2(r * std::cos(t), r * std::sin(t)));
  }
  return Curve(std::move(pts));
}

}  // namespace

TEST_CASE("curve validation") {
  CHECK_THROWS_AS(Curve({v2(0, 0)}), InputError);
  CHECK_THROWS_AS(Curve({v2(0, 0), v2(0, 0)}), InputError);
  CHECK_THROWS_AS(Curve({v2(0, 0), v2(NAN, 0)}), InputError);
  const Curve c({v2(0, 0), v2(3, 0), v2(3, 4)});
  CHECK(c.length() == doctest::Approx(7.0));
  CHECK(c.at(1.5).isApprox(v2(3, 2)));
}

TEST_CASE("grid indexing") {
  const auto g = GridSpec::cube(v2(0, 0), v2(1, 1), 4);
  CHECK(g.cell_count() == 16);
  CHECK(g.cell_volume() == doctest::Approx(1.0 / 16));
  CHECK(g.cell_of(v2(0.3, 0.6)) == 1 + 4 * 2);
  CHECK(g.cell_center(9).isApprox(v2(0.375, 0.625)));
  CHECK(g.contains(v2(1, 1)));
  CHECK_FALSE(g.contains(v2(1.1, 0.5)));
  CHECK_THROWS_AS(GridSpec(v2(0, 0), v2(1, 1), {0, 4}), InputError);
  CHECK_THROWS_AS(GridDensity(g, Vec::Constant(16, -1.0)), InputError);
}

TEST_CASE("line integral oracles") {
  const auto g = GridSpec::cube(v2(-1, -1), v2(4, 4), 50);
  const Curve seg({v2(0, 0), v2(3, 0)});
  CHECK(line_integral(GridDensity::constant(g, 1.0), seg) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(line_integral(GridDensity::constant(g, 0.0), seg) == 0.0);
  const Curve diag({v2(0, 0), v2(2, 2), v2(2, 3)});
  CHECK(line_integral(GridDensity::constant(g, 2.0), diag) == doctest::Approx(2.0 * diag.length()).epsilon(1e-12));
  CHECK_THROWS_AS(line_integral(GridDensity::constant(g, 1.0), Curve({v2(0, 0), v2(5, 0)})), InputError);
}

TEST_CASE("line integral of the optimal ring density along a radius") {
  const auto g = GridSpec::centered(Vec::Zero(2), 2.0, 512);
  Vec rho(static_cast<Eigen::Index>(g.cell_count()));
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const double r = g.cell_center(c).norm();
    rho[static_cast<Eigen::Index>(c)] = (r > 1.0 && r < 2.0) ? 1.0 / (r * std::log(2.0)) : 0.0;
  }
  const Curve seg({v2(1, 0.001), v2(2, 0.001)});
  CHECK(line_integral(GridDensity(g, rho), seg) == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("cell lengths sum to the curve length and merge revisits") {
  const auto g = GridSpec::cube(v2(0, 0), v2(1, 1), 8);
  const Curve back_and_forth({v2(0.01, 0.01), v2(0.1, 0.01), v2(0.02, 0.01)});
  const auto cl = cell_lengths(g, back_and_forth);
  CHECK(cl.cells.size() == 1);
  CHECK(cl.lengths[0] == doctest::Approx(0.17));
  const Curve slant({v2(0.05, 0.05), v2(0.95, 0.6)});
  const auto s = cell_lengths(g, slant);
  double total = 0.0;
  for (double l : s.lengths) total += l;
  CHECK(total == doctest::Approx(slant.length()).epsilon(1e-12));
}

TEST_CASE("crossing subcurve of a collinear segment") {
  const SphericalRing ring(Vec::Zero(2), 1.0, 2.0);
  const auto sub = crossing_subcurve(Curve({v2(0, 0), v2(3, 0)}), ring);
  CHECK(sub.front().isApprox(v2(1, 0), 1e-12));
  CHECK(sub.back().isApprox(v2(2, 0), 1e-12));
  CHECK_THROWS_AS(crossing_subcurve(Curve({v2(1.2, 0), v2(1.8, 0.1)}), ring), NoCrossing);
}

TEST_CASE("crossing subcurve of random zigzags matches a brute-force scan") {
  std::mt19937_64 rng(11);
  const SphericalRing ring(Vec::Zero(2), 1.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const Curve c = zigzag(rng, 0.5, 2.5, 12);
    const auto sub = crossing_subcurve(c, ring);
    const double a = sub.front().norm(), b = sub.back().norm();
    CHECK(std::min(std::abs(a - 1.0), std::abs(a - 2.0)) < 1e-9);
    CHECK(std::min(std::abs(b - 1.0), std::abs(b - 2.0)) < 1e-9);
    CHECK(std::abs(a - b) == doctest::Approx(1.0).epsilon(1e-8));
    for (std::size_t i = 1; i + 1 < sub.size(); ++i) {
      CHECK(sub.vertices()[i].norm() >= 1.0 - 1e-9);
      CHECK(sub.vertices()[i].norm() <= 2.0 + 1e-9);
    }
    // The subcurve starts at the first sphere hit that is followed by a hit
    // of the other sphere, so its start point is one of the scanned hits.
    auto hits1 = brute_force_crossings(c, 1.0), hits2 = brute_force_crossings(c, 2.0);
    double best = 1e9;
    for (double u : hits1) best = std::min(best, (c.at(u) - sub.front()).norm());
    for (double u : hits2) best = std::min(best, (c.at(u) - sub.front()).norm());
    CHECK(best < 1e-7);
  }
}

TEST_CASE("minorization") {
  const Vec y1 = v2(0.3, -0.2);
  const SphericalRing ring(y1, 1.0, 2.0);
  CurveFamily radial;
  for (const auto& d : sphere_directions(2, 16)) radial.curves.emplace_back(std::vector<Vec>{y1 + 0.1 * d, y1 + 5 * d});
  CHECK(minorizes(radial, ring).holds);

  CurveFamily arcs;
  for (int j = 0; j < 4; ++j) {
    std::vector<Vec> pts;
    for (int i = 0; i < 10; ++i) {
      const double t = 0.3 * i;
      pts.push_back(y1 + (0.2 + 0.15 * j) * v2(std::cos(t), std::sin(t)));
    }
    arcs.curves.emplace_back(std::move(pts));
  }
  const auto rep = minorizes(arcs, ring);
  CHECK_FALSE(rep.holds);
  CHECK(rep.failed.size() == 4);

  std::mt19937_64 rng(5);
  CurveFamily wild;
  for (int i = 0; i < 100; ++i) {
    Curve c = zigzag(rng, 0.4, 2.8, 9);
    std::vector<Vec> shifted;
    for (const auto& v : c.vertices()) shifted.push_back(v + y1);
    wild.curves.emplace_back(std::move(shifted));
  }
  const auto w = minorizes(wild, ring);
  CHECK(w.holds);
  CHECK(w.extracted.size() == 100);
  for (const auto& s : w.extracted.curves) {
    const double a = (s.front() - y1).norm(), b = (s.back() - y1).norm();
    CHECK(std::abs(a - b) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("ring families") {
  const SphericalRing ring(Vec::Zero(2), 1.0, 2.0);
  const auto fam = generate_ring_family(ring, 4, RingFamilyKind::radial);
  REQUIRE(fam.size() == 4);
  for (int i = 0; i < 4; ++i) {
    const double t = std::numbers::pi / 2 * i;
    CHECK((fam.curves[i].front() - v2(std::cos(t), std::sin(t))).norm() < 1e-12);
    CHECK((fam.curves[i].back() - 2.0 * v2(std::cos(t), std::sin(t))).norm() < 1e-12);
  }
  const auto sp = generate_ring_family(ring, 6, RingFamilyKind::spiral, 64);
  for (const auto& c : sp.curves) {
    CHECK(c.front().norm() == doctest::Approx(1.0));
    CHECK(c.back().norm() == doctest::Approx(2.0));
    CHECK(c.size() <= 64);
  }
  const SphericalRing ring3(Vec::Zero(3), 1.0, std::exp(1.0));
  for (const auto& c : generate_ring_family(ring3, 50, RingFamilyKind::spiral, 40).curves) {
    CHECK(c.front().norm() == doctest::Approx(1.0));
    CHECK(c.back().norm() == doctest::Approx(std::exp(1.0)));
  }
  for (const auto& d : sphere_directions(3, 100)) CHECK(d.norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(generate_ring_family(ring, 0, RingFamilyKind::radial), InputError);
}

TEST_CASE("family text round trip is exact") {
  const SphericalRing ring(v2(0.1, 0.2), 0.3, 0.7);
  auto fam = generate_ring_family(ring, 5, RingFamilyKind::spiral, 20);
  fam.label = "spirals for the round trip";
  std::stringstream ss;
  write_family(ss, fam);
  const auto back = read_family(ss);
  CHECK(back.label == fam.label);
  REQUIRE(back.size() == fam.size());
  for (std::size_t i = 0; i < fam.size(); ++i) {
    REQUIRE(back.curves[i].size() == fam.curves[i].size());
    for (std::size_t j = 0; j < fam.curves[i].size(); ++j)
      CHECK(back.curves[i].vertices()[j] == fam.curves[i].vertices()[j]);
  }
  std::stringstream bad("1,2 3\n");
  CHECK_THROWS_AS(read_family(bad), InputError);
}

TEST_CASE("resample keeps the endpoints") {
  const Curve c({v2(0, 0), v2(1, 0), v2(1, 1)});
  const auto r = resample(c, 5);
  CHECK(r.size() == 5);
  CHECK(r.front().isApprox(c.front()));
  CHECK(r.back().isApprox(c.back()));
  CHECK(r.vertices()[2].isApprox(v2(1, 0)));
}
