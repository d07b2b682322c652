#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "modlab/geometry.hpp"

using namespace modlab;

namespace {

Vec v2(double x, double y) { return (Vec(2) << x, y).finished(); }

/// Stereographic image on the sphere of diameter 1 tangent to the plane at 0.
Eigen::Vector3d riemann(const Vec& x) {
  const double s = 1.0 + x.squaredNorm();
  return {x[0] / s, x[1] / s, x.squaredNorm() / s};
}

}  // namespace

TEST_CASE("chordal distance of simple pairs") {
  const auto o = ExtendedPoint::origin(2);
  const auto inf = ExtendedPoint::infinity(2);
  const ExtendedPoint e1(v2(1, 0));
  CHECK(chordal_distance(o, inf) == doctest::Approx(1.0));
  CHECK(chordal_distance(e1, e1) == 0.0);
  CHECK(chordal_distance(inf, inf) == 0.0);
  CHECK(chordal_distance(o, e1) == doctest::Approx(0.70711).epsilon(1e-5));
}

TEST_CASE("chordal distance equals the chord between Riemann-sphere images") {
  const std::vector<Vec> pts{v2(0, 0), v2(1, 0), v2(-2.5, 0.3), v2(0.01, -7), v2(40, 40)};
  for (const auto& a : pts)
    for (const auto& b : pts) {
      const double chord = (riemann(a) - riemann(b)).norm();
      CHECK(chordal_distance(ExtendedPoint(a), ExtendedPoint(b)) == doctest::Approx(chord).epsilon(1e-12));
    }
  const Eigen::Vector3d north(0, 0, 1);
  for (const auto& a : pts)
    CHECK(chordal_distance(ExtendedPoint(a), ExtendedPoint::infinity(2)) ==
          doctest::Approx((riemann(a) - north).norm()).epsilon(1e-12));
}

TEST_CASE("coordinates of infinity are not accessible") {
  CHECK_THROWS_AS(ExtendedPoint::infinity(2).coords(), InputError);
}

TEST_CASE("set distance between concentric circle samples") {
  std::vector<ExtendedPoint> a, b;
  for (int i = 0; i < 360; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 360;
    a.emplace_back(v2(std::cos(t), std::sin(t)));
    b.emplace_back(v2(3 * std::cos(t), 3 * std::sin(t)));
  }
  // Brute force over collinear pairs: h((1,0),(3,0)) = 2 / (sqrt2 sqrt10).
  CHECK(chordal_set_distance(a, b) == doctest::Approx(2.0 / std::sqrt(20.0)).epsilon(1e-9));
  CHECK(chordal_set_distance(a, a) == 0.0);
  std::vector<ExtendedPoint> o{ExtendedPoint::origin(2)}, inf{ExtendedPoint::infinity(2)};
  CHECK(chordal_set_distance(o, inf) == doctest::Approx(1.0));
  std::vector<ExtendedPoint> none;
  CHECK_THROWS_AS(chordal_set_distance(none, a), InputError);
}

TEST_CASE("ring membership") {
  const SphericalRing ring(Vec::Zero(2), 1.0, 2.0);
  CHECK(ring_membership(ExtendedPoint(v2(1.5, 0)), ring) == RingPosition::in_open_ring);
  CHECK(ring_membership(ExtendedPoint(v2(1, 0)), ring, 1e-12) == RingPosition::on_inner_sphere);
  CHECK(ring_membership(ExtendedPoint(v2(0, 2)), ring) == RingPosition::on_outer_sphere);
  CHECK(ring_membership(ExtendedPoint(v2(3, 0)), ring) == RingPosition::outside);
  CHECK(ring_membership(ExtendedPoint(v2(0.2, 0)), ring) == RingPosition::inside);
  CHECK(to_string(RingPosition::in_open_ring) == "in_open_ring");
}

TEST_CASE("ring and ball validation") {
  CHECK_THROWS_AS(SphericalRing(Vec::Zero(2), 2.0, 1.0), InputError);
  CHECK_THROWS_AS(SphericalRing(Vec::Zero(2), 0.0, 1.0), InputError);
  CHECK_THROWS_AS(SphericalRing(Vec::Zero(2), 1.0, INFINITY), InputError);
  CHECK_THROWS_AS(ChordalBall(ExtendedPoint::origin(2), 0.0), InputError);
  CHECK_THROWS_AS(ChordalBall(ExtendedPoint::origin(2), 1.5), InputError);
}

TEST_CASE("chordal ball around infinity") {
  const ChordalBall b(ExtendedPoint::infinity(2), 0.1);
  CHECK(b.contains(ExtendedPoint(v2(100, 0))));
  CHECK_FALSE(b.contains(ExtendedPoint(v2(1, 0))));
  CHECK(b.contains(ExtendedPoint::infinity(2)));
  const ChordalBall e(ExtendedPoint(v2(1, 1)), 0.5);
  CHECK(e.contains(ExtendedPoint(v2(1.2, 1))));
  CHECK_FALSE(e.contains(ExtendedPoint(v2(2, 1))));
}

TEST_CASE("unit sphere area and ball volume") {
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * std::numbers::pi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * std::numbers::pi));
  CHECK(unit_sphere_area(4) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 / 3.0 * std::numbers::pi));
  CHECK(ball_volume(2, 2.0) == doctest::Approx(4 * std::numbers::pi));
  CHECK(std::isinf(ball_volume(2, INFINITY)));
}
