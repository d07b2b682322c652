#ifndef MODLAB_MAPPINGS_HPP
#define MODLAB_MAPPINGS_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modlab/curves.hpp"
#include "modlab/modulus.hpp"

namespace modlab {

enum class MappingKind { identity, winding, radial_stretch, inversion, composition };

std::string_view to_string(MappingKind kind);

/// A member of the mapping zoo, defined on the punctured ball
/// B(center, epsilon0) \ {center}. All maps act on u = x - center and return
/// center + g(u); compositions apply `parts` first to last about one center.
struct MappingSpec {
  MappingKind kind = MappingKind::identity;
  int dim = 2;
  int k = 1;           ///< winding number
  double alpha = 1.0;  ///< radial stretch exponent
  std::vector<MappingSpec> parts;
  Vec center;          ///< the puncture x0 (defaults to the origin)
  double epsilon0 = 1.0;  ///< domain radius; +infinity for R^n \ {x0}

  static MappingSpec identity(int n);
  static MappingSpec winding(int k, int n);
  static MappingSpec radial_stretch(double alpha, int n);
  static MappingSpec inversion(int n);
  static MappingSpec composition(std::vector<MappingSpec> parts);

  /// Copy with a different puncture and domain radius (propagated to parts).
  MappingSpec with_domain(const Vec& x0, double eps0) const;

  const Vec& puncture() const { return center; }
  std::string describe() const;
};

/// Throws InputError when the mapping violates k >= 1, alpha > 0, nonempty
/// composition, or consistent dimension/center.
void validate(const MappingSpec& f);

/// MappingSpec from named parameters: kind, k, alpha, center, epsilon0, dim,
/// and parts (comma-separated kinds, e.g. "winding:3,radial_stretch:2").
MappingSpec parse_mapping(const std::map<std::string, std::string>& params);

bool in_domain(const MappingSpec& f, const Vec& x);

Vec evaluate(const MappingSpec& f, const Vec& x);
ExtendedPoint evaluate(const MappingSpec& f, const ExtendedPoint& x);

/// Analytic derivative matrix f'(x). Throws ChartSingularity on the winding axis.
Mat derivative(const MappingSpec& f, const Vec& x);
Mat finite_difference_derivative(const MappingSpec& f, const Vec& x, double h);

/// Number of preimages of a generic image point.
int multiplicity(const MappingSpec& f);

/// All preimages of y inside the domain (empty when y is not in f(D)).
std::vector<Vec> preimages(const MappingSpec& f, const Vec& y);

/// f(D) for zoo maps: the open shell {inner < |y - center| < outer}.
struct ImageShell {
  Vec center;
  double inner = 0.0;
  double outer = std::numeric_limits<double>::infinity();
  /// True when the puncture x0 corresponds to the inner boundary.
  bool puncture_inside = true;

  bool contains(const Vec& y) const;
  double volume() const;
};

ImageShell image_shell(const MappingSpec& f);

/// Limit of f at the puncture: the shell centre, or infinity when the map
/// sends x0 to the outer boundary.
ExtendedPoint limit_at_puncture(const MappingSpec& f);

enum class DegenerateCase { none, zero_derivative, singular_jacobian };

struct DistortionReport {
  ExtendedPoint point;
  double operator_norm = 0.0;
  double jacobian_det = 0.0;
  double k_o = 1.0;
  DegenerateCase degenerate = DegenerateCase::none;
};

/// K_O = |f'|^n / |J| with K_O = 1 when f' = 0 and K_O = inf when f' != 0, J = 0.
DistortionReport distortion_from_matrix(const Mat& derivative, const ExtendedPoint& at = {});

struct AnalyticMode {};
struct FiniteDifferenceMode {
  double h = 1e-4;
};
using DerivativeMode = std::variant<AnalyticMode, FiniteDifferenceMode>;

DistortionReport distortion_at(const MappingSpec& f, const Vec& x, DerivativeMode mode = AnalyticMode{});

using ImageRegion = std::variant<SphericalRing, EuclideanBall>;

struct WeightQ {
  double value = 1.0;  ///< Q = N * K, constant on the image
  int multiplicity = 1;
  double max_distortion = 1.0;
  double l1_norm = 0.0;  ///< value * |region ∩ f(D)|
  double region_volume = 0.0;

  ScalarField field() const {
    const double q = value;
    return [q](const Vec&) { return q; };
  }
};

WeightQ weight_q(const MappingSpec& f, const ImageRegion& region);

/// Essential supremum of K_O over the domain (closed form for zoo maps).
double max_distortion(const MappingSpec& f);

enum class LiftStatus { completed, hit_puncture, hit_outer_sphere };
std::string_view to_string(LiftStatus s);

struct LiftResult {
  Curve curve;
  LiftStatus status;
  std::size_t lifted_vertices;  ///< image vertices that were lifted
};

/// Vertex-by-vertex branch continuation: each image vertex is lifted to the
/// preimage closest to the previous lifted vertex. Stops at the first image
/// vertex outside f(D) and reports which boundary component was approached.
LiftResult lift_curve(const MappingSpec& f, const Curve& image_curve, const Vec& start,
                      double tau = kSphereTolerance, double ambiguity_tol = 1e-6);

/// Representative limit points of f at x0, from images of spheres S(x0, r) at
/// the smallest radii clustered by single linkage in the chordal metric.
std::vector<ExtendedPoint> cluster_set_estimate(const MappingSpec& f, const Vec& x0,
                                                const std::vector<double>& sample_radii,
                                                int samples_per_radius, double delta_c = 0.05,
                                                std::uint64_t seed = 0);

}  // namespace modlab

#endif  // MODLAB_MAPPINGS_HPP
