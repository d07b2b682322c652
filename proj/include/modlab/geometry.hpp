#ifndef MODLAB_GEOMETRY_HPP
#define MODLAB_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "modlab/errors.hpp"

namespace modlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Default absolute tolerance for sphere membership of sampled points.
inline constexpr double kSphereTolerance = 1e-9;

/// A point of the one-point compactification of R^n.
class ExtendedPoint {
 public:
  ExtendedPoint() = default;
  explicit ExtendedPoint(Vec coords);

  static ExtendedPoint infinity(int dim);
  static ExtendedPoint origin(int dim) { return ExtendedPoint(Vec::Zero(dim)); }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }
  int dim() const noexcept { return dim_; }

  /// Coordinates of a finite point; throws InputError at infinity.
  const Vec& coords() const;

 private:
  Vec coords_;
  int dim_ = 0;
  bool infinite_ = false;
};

/// Open spherical ring {y : r_inner < |y - center| < r_outer}.
class SphericalRing {
 public:
  SphericalRing(Vec center, double r_inner, double r_outer);

  const Vec& center() const noexcept { return center_; }
  double r_inner() const noexcept { return r_inner_; }
  double r_outer() const noexcept { return r_outer_; }
  int dim() const noexcept { return static_cast<int>(center_.size()); }

 private:
  Vec center_;
  double r_inner_;
  double r_outer_;
};

/// Euclidean ball B(center, radius); radius may be +infinity (all of R^n).
struct EuclideanBall {
  Vec center;
  double radius;
};

/// B_*(y, eps): the Euclidean ball when y is finite, the chordal
/// neighbourhood {x : h(x, inf) < eps} when y is the point at infinity.
class ChordalBall {
 public:
  ChordalBall(ExtendedPoint center, double radius);

  const ExtendedPoint& center() const noexcept { return center_; }
  double radius() const noexcept { return radius_; }

  bool contains(const ExtendedPoint& x) const;

 private:
  ExtendedPoint center_;
  double radius_;
};

/// Chordal distance of two finite coordinate vectors.
template <typename DA, typename DB>
double chordal(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  const double nx = std::sqrt(1.0 + x.squaredNorm());
  const double ny = std::sqrt(1.0 + y.squaredNorm());
  return (x - y).norm() / (nx * ny);
}

/// Chordal distance of a finite point to infinity.
template <typename D>
double chordal_to_infinity(const Eigen::MatrixBase<D>& x) {
  return 1.0 / std::sqrt(1.0 + x.squaredNorm());
}

double chordal_distance(const ExtendedPoint& x, const ExtendedPoint& y);

/// Infimum of pairwise chordal distances between two finite samples.
double chordal_set_distance(std::span<const ExtendedPoint> a,
                            std::span<const ExtendedPoint> b);

enum class RingPosition {
  inside,
  on_inner_sphere,
  on_outer_sphere,
  in_open_ring,
  outside
};

std::string_view to_string(RingPosition p);

RingPosition ring_membership(const ExtendedPoint& y, const SphericalRing& ring,
                             double tau = kSphereTolerance);

/// Volume of the Euclidean unit ball in R^n.
double unit_ball_volume(int n);

/// Surface area of the unit sphere S^{n-1} in R^n, 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

/// Volume of the ball of radius r in R^n (r may be infinite).
double ball_volume(int n, double r);

}  // namespace modlab

#endif  // MODLAB_GEOMETRY_HPP
