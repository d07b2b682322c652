#ifndef MODLAB_CURVES_HPP
#define MODLAB_CURVES_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "modlab/geometry.hpp"

namespace modlab {

/// Default number of vertices used when sampling smooth curves.
inline constexpr int kDefaultVertexBudget = 512;

/// Piecewise-linear curve through finite vertices, parameterized by arc length.
class Curve {
 public:
  explicit Curve(std::vector<Vec> vertices);

  const std::vector<Vec>& vertices() const noexcept { return vertices_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  int dim() const noexcept { return static_cast<int>(vertices_.front().size()); }
  const Vec& front() const { return vertices_.front(); }
  const Vec& back() const { return vertices_.back(); }

  double length() const;
  /// Point at fractional vertex parameter u in [0, size()-1].
  Vec at(double u) const;

 private:
  std::vector<Vec> vertices_;
};

struct CurveFamily {
  std::vector<Curve> curves;
  std::string label;

  bool empty() const noexcept { return curves.empty(); }
  std::size_t size() const noexcept { return curves.size(); }
  int dim() const { return curves.empty() ? 0 : curves.front().dim(); }
  /// Throws InputError when curves of different dimension are mixed.
  void validate() const;
};

/// Axis-aligned box split into a regular grid of cells (row-major, axis 0 fastest).
class GridSpec {
 public:
  GridSpec(Vec lower, Vec upper, std::vector<int> resolution);
  /// Square/cubic box with the same resolution on every axis.
  static GridSpec cube(const Vec& lower, const Vec& upper, int resolution);
  /// Cube of half-width `half_width` centred at `center`.
  static GridSpec centered(const Vec& center, double half_width, int resolution);

  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  const Vec& lower() const noexcept { return lower_; }
  const Vec& upper() const noexcept { return upper_; }
  const std::vector<int>& resolution() const noexcept { return resolution_; }
  const Vec& cell_size() const noexcept { return cell_; }
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t cell_count() const noexcept { return cell_count_; }

  bool contains(const Vec& x, double slack = 0.0) const;
  /// Linear index of the cell holding x (clamped onto the box).
  std::size_t cell_of(const Vec& x) const;
  Vec cell_center(std::size_t index) const;

 private:
  Vec lower_, upper_, cell_;
  std::vector<int> resolution_;
  double cell_volume_ = 0.0;
  std::size_t cell_count_ = 0;
};

/// Nonnegative cell-centred density on a grid.
class GridDensity {
 public:
  explicit GridDensity(GridSpec grid);
  GridDensity(GridSpec grid, Vec values);
  static GridDensity constant(GridSpec grid, double value);

  const GridSpec& grid() const noexcept { return grid_; }
  const Vec& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  /// Sum over cells of rho^p times the cell volume.
  double energy(double p) const;

 private:
  GridSpec grid_;
  Vec values_;
};

/// Lengths of a curve's pieces inside each cell it visits, in traversal order
/// (a revisited cell keeps the position of its first visit).
struct CellLengths {
  std::vector<std::size_t> cells;
  std::vector<double> lengths;

  double dot(const Vec& rho) const;
};

/// Splits every segment at the grid planes it crosses and assigns each piece
/// to the cell containing its midpoint. Throws InputError if the curve leaves
/// the grid box.
CellLengths cell_lengths(const GridSpec& grid, const Curve& curve);

/// Integral of a cell-constant density along a polyline.
double line_integral(const GridDensity& rho, const Curve& curve);

/// The first subcurve that runs from one bounding sphere of `ring` to the other
/// while staying in the closed ring. Throws NoCrossing when there is none.
Curve crossing_subcurve(const Curve& curve, const SphericalRing& ring,
                        double tau = kSphereTolerance);

struct MinorizationReport {
  bool holds = false;
  CurveFamily extracted;
  std::size_t sample_size = 0;
  std::vector<std::size_t> failed;  ///< indices of curves with no crossing
};

/// Certifies that every sampled curve has a subcurve joining the spheres of `ring`.
MinorizationReport minorizes(const CurveFamily& family, const SphericalRing& ring,
                             double tau = kSphereTolerance);

enum class RingFamilyKind { radial, spiral };

/// Unit directions spread evenly over S^{n-1}: angles 2 pi i / count for n = 2,
/// a Fibonacci lattice for n = 3, seeded Gaussian samples above that.
std::vector<Vec> sphere_directions(int n, int count, std::uint64_t seed = 0);

CurveFamily generate_ring_family(const SphericalRing& ring, int count, RingFamilyKind kind,
                                 int vertex_budget = kDefaultVertexBudget);

/// Resample a polyline to `vertices` points evenly spaced in arc length.
Curve resample(const Curve& curve, int vertices);

/// Text format: '#' comment lines, "# label: <text>", then one curve per line
/// with whitespace-separated vertices written as comma-separated coordinates.
void write_family(std::ostream& os, const CurveFamily& family);
CurveFamily read_family(std::istream& is);

}  // namespace modlab

#endif  // MODLAB_CURVES_HPP
