#include "modlab/geometry.hpp"

#include <limits>
#include <numbers>

namespace modlab {

ExtendedPoint::ExtendedPoint(Vec coords)
    : coords_(std::move(coords)), dim_(static_cast<int>(coords_.size())) {
  if (dim_ < 1) throw InputError("ExtendedPoint: empty coordinate vector");
  if (!coords_.allFinite())
    throw InputError("ExtendedPoint: non-finite coordinates (use infinity())");
}

ExtendedPoint ExtendedPoint::infinity(int dim) {
  if (dim < 1) throw InputError("ExtendedPoint::infinity: dim must be >= 1");
  ExtendedPoint p;
  p.dim_ = dim;
  p.infinite_ = true;
  return p;
}

const Vec& ExtendedPoint::coords() const {
  if (infinite_) throw InputError("ExtendedPoint: the point at infinity has no coordinates");
  return coords_;
}

SphericalRing::SphericalRing(Vec center, double r_inner, double r_outer)
    : center_(std::move(center)), r_inner_(r_inner), r_outer_(r_outer) {
  if (center_.size() < 1 || !center_.allFinite())
    throw InputError("SphericalRing: center must be a finite point");
  if (!(r_inner > 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer))
    throw InputError("SphericalRing: require 0 < r_inner < r_outer < inf");
}

ChordalBall::ChordalBall(ExtendedPoint center, double radius)
    : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0) || radius > 1.0)
    throw InputError("ChordalBall: radius must lie in (0, 1]");
}

bool ChordalBall::contains(const ExtendedPoint& x) const {
  if (x.dim() != center_.dim()) throw InputError("ChordalBall: dimension mismatch");
  if (center_.is_infinite()) return chordal_distance(x, center_) < radius_;
  if (x.is_infinite()) return false;
  return (x.coords() - center_.coords()).norm() < radius_;
}

double chordal_distance(const ExtendedPoint& x, const ExtendedPoint& y) {
  if (x.dim() != y.dim()) throw InputError("chordal_distance: dimension mismatch");
  if (x.is_infinite() && y.is_infinite()) return 0.0;
  if (x.is_infinite()) return chordal_to_infinity(y.coords());
  if (y.is_infinite()) return chordal_to_infinity(x.coords());
  return chordal(x.coords(), y.coords());
}

double chordal_set_distance(std::span<const ExtendedPoint> a,
                            std::span<const ExtendedPoint> b) {
  if (a.empty() || b.empty()) throw InputError("chordal_set_distance: empty point set");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a) {
    for (const auto& q : b) {
      best = std::min(best, chordal_distance(p, q));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

std::string_view to_string(RingPosition p) {
  switch (p) {
    case RingPosition::inside: return "inside";
    case RingPosition::on_inner_sphere: return "on_inner_sphere";
    case RingPosition::on_outer_sphere: return "on_outer_sphere";
    case RingPosition::in_open_ring: return "in_open_ring";
    case RingPosition::outside: return "outside";
  }
  return "unknown";
}

RingPosition ring_membership(const ExtendedPoint& y, const SphericalRing& ring, double tau) {
  if (y.is_infinite()) throw InputError("ring_membership: point must be finite");
  if (y.dim() != ring.dim()) throw InputError("ring_membership: dimension mismatch");
  const double d = (y.coords() - ring.center()).norm();
  if (std::abs(d - ring.r_inner()) <= tau) return RingPosition::on_inner_sphere;
  if (std::abs(d - ring.r_outer()) <= tau) return RingPosition::on_outer_sphere;
  if (d < ring.r_inner()) return RingPosition::inside;
  if (d < ring.r_outer()) return RingPosition::in_open_ring;
  return RingPosition::outside;
}

namespace {

// Gamma(m/2) for positive integers m, via Gamma(1) = 1, Gamma(1/2) = sqrt(pi).
double gamma_half_integer(int m) {
  double g = (m % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
  for (int k = (m % 2 == 0) ? 2 : 1; k < m; k += 2) g *= 0.5 * k;
  return g;
}

}  // namespace

double unit_sphere_area(int n) {
  if (n < 1) throw InputError("unit_sphere_area: n must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / gamma_half_integer(n);
}

double unit_ball_volume(int n) { return unit_sphere_area(n) / n; }

double ball_volume(int n, double r) {
  if (std::isinf(r)) return std::numeric_limits<double>::infinity();
  return unit_ball_volume(n) * std::pow(r, n);
}

}  // namespace modlab
