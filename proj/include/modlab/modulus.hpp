#ifndef MODLAB_MODULUS_HPP
#define MODLAB_MODULUS_HPP

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "modlab/curves.hpp"

namespace modlab {

/// Closed-form n-modulus of the curves joining the boundary spheres of
/// A(y0, r1, r2): omega_{n-1} / log(r2/r1)^{n-1}.
double ring_modulus_analytic(int n, double r1, double r2);

struct SolverOptions {
  double tol = 1e-3;             ///< max constraint violation accepted
  long max_iterations = 100000;  ///< total dual-ascent iterations over all rounds
  int threads = 1;               ///< workers for the per-curve parallel map
  int add_per_round = 1;         ///< most-violated curves added per round
};

struct ModulusResult {
  double value = 0.0;        ///< energy of the returned (feasible) density
  double lower_bound = 0.0;  ///< dual objective at termination
  GridDensity density;
  long iterations = 0;
  int rounds = 0;
  std::size_t active_constraints = 0;
  double residual = 0.0;     ///< max(0, 1 - integral) over the full family
  std::size_t family_size = 0;
};

/// Discrete p-modulus of a finite curve family on a cell-constant density grid:
/// minimize sum rho^p |cell| subject to line_integral(rho, gamma) >= 1.
///
/// Constraint generation over the family; each subproblem is solved by
/// projected Barzilai-Borwein ascent on the Lagrangian dual with the primal
/// density recovered as rho = (sum lambda * len / (p |cell|))^{1/(p-1)}.
/// The returned density is rescaled to satisfy every constraint, so `value`
/// is an upper bound and `lower_bound` a lower bound for the discrete problem.
ModulusResult discrete_modulus(const CurveFamily& family, const GridSpec& grid, double p,
                               const SolverOptions& options = {});

nlohmann::json to_json(const ModulusResult& result);

/// CSV with columns cell,x0..x{n-1},rho.
void write_density_csv(std::ostream& os, const GridDensity& density);

/// Nonnegative radial weight eta on (r1, r2) for the Poletski-type inequality.
class EtaFunction {
 public:
  enum class Kind { piecewise_constant, inverse_log, power };

  /// Value values[i] on [breaks[i], breaks[i+1]), zero outside.
  static EtaFunction piecewise(std::vector<double> breaks, std::vector<double> values);
  /// 1 / (r log(r2/r1)) on [r1, r2], zero outside.
  static EtaFunction inverse_log(double r1, double r2);
  /// scale * r^exponent on [a, b], zero outside.
  static EtaFunction power(double scale, double exponent, double a, double b);
  /// Power law normalised to unit integral over [r1, r2].
  static EtaFunction power_law(double exponent, double r1, double r2);

  Kind kind() const noexcept { return kind_; }
  double operator()(double r) const;
  /// Support [lo, hi] outside which eta vanishes.
  double support_lo() const noexcept { return lo_; }
  double support_hi() const noexcept { return hi_; }
  std::string describe() const;

  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  Kind kind_ = Kind::piecewise_constant;
  std::vector<double> breaks_, values_;
  double scale_ = 0.0, exponent_ = 0.0, lo_ = 0.0, hi_ = 0.0;
};

/// The test function of the proof: 1/(r2 - r1) on [r1, r2], zero elsewhere.
EtaFunction uniform_eta(double r1, double r2);

struct AdmissibleCheck {
  bool admissible = false;
  double integral = 0.0;
};

/// Integral of eta over (r1, r2): exact for piecewise-constant eta, composite
/// Gauss-Legendre otherwise. Admissible iff the integral is >= 1 - 1e-12.
AdmissibleCheck admissible_check(const EtaFunction& eta, double r1, double r2);

using ScalarField = std::function<double(const Vec&)>;
using Indicator = std::function<bool(const Vec&)>;

struct QuadratureResult {
  double value = 0.0;
  int resolution = 0;   ///< cells per axis at the final level
  bool converged = false;
};

/// Midpoint-rule integral of integrand * mask over the ring A(center, r1, r2);
/// cells cut by a ring sphere are sub-sampled. The resolution doubles from
/// `resolution` until successive values differ by less than `rel_tol`.
QuadratureResult integrate_over_ring(const ScalarField& integrand, const SphericalRing& ring,
                                     const Indicator& mask, int resolution, double rel_tol = 1e-3);

/// Integral of Q(y) * eta(|y - y0|)^n over mask ∩ A(y0, r1, r2).
double weighted_rhs_integral(const ScalarField& q, const EtaFunction& eta, const SphericalRing& ring,
                             const Indicator& domain_mask, int n, int resolution = 128);

/// Geometry of the blow-up experiment: two collinear radial segments on
/// opposite sides of x0 = 0 inside B(0, eps0), separated by `separation`,
/// joined by half-circle arcs centred at x0.
struct BlowupGeometry {
  double eps0 = 0.5;
  double outer_fraction = 0.9;  ///< segments end at radius outer_fraction * eps0
};

/// Arcs joining the two segments; radii on the lattice (i + 1/2) h/2 (h the cell
/// size of a `resolution`^2 grid on the ball's box) with separation / 2 <= r <= R.
CurveFamily blowup_family(double separation, int resolution, const BlowupGeometry& geom = {});

double blowup_experiment(double separation, int resolution, const SolverOptions& options = {},
                         const BlowupGeometry& geom = {});

}  // namespace modlab

#endif  // MODLAB_MODULUS_HPP
