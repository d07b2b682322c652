#ifndef MODLAB_VERIFIER_HPP
#define MODLAB_VERIFIER_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "modlab/mappings.hpp"
#include "modlab/modulus.hpp"

namespace modlab {

/// Relative slack granted to the discrete side of every inequality check.
inline constexpr double kInequalityTolerance = 0.02;

/// Solver settings used by the scenarios: a batch of violated curves per round.
SolverOptions scenario_solver_defaults();

struct GammaOptions {
  RingFamilyKind kind = RingFamilyKind::radial;
  int lift_vertices = 64;  ///< image curves are resampled to this many vertices before lifting
};

/// Curves in the domain whose images join the spheres of A(y0, r1, r2): the
/// image ring family lifted from every preimage of each curve's first point.
/// Lifts that leave f(D) before reaching the outer sphere are dropped.
CurveFamily build_gamma_f(const MappingSpec& f, const ExtendedPoint& y0, double r1, double r2, int count,
                          const GammaOptions& options = {});

/// Square (cubic) grid around the bounding box of a family.
GridSpec bounding_grid(const CurveFamily& family, int resolution);

/// The default eta library: uniform, 1/(r log(r2/r1)), and r^{-1/2} normalised.
std::vector<EtaFunction> default_eta_library(double r1, double r2);

struct PoletskiReport {
  MappingSpec mapping;
  ExtendedPoint y0;
  double r1 = 0.0;
  double r2 = 0.0;
  ModulusResult lhs;
  std::vector<std::pair<EtaFunction, double>> rhs_per_eta;
  WeightQ q;
  bool satisfied = false;
  double slack = 0.0;  ///< min over eta of rhs - lhs
};

struct PoletskiOptions {
  int resolution = 256;
  int count = 512;
  int rhs_resolution = 128;
  SolverOptions solver = scenario_solver_defaults();
  GammaOptions gamma;
};

PoletskiReport verify_poletski(const MappingSpec& f, const ExtendedPoint& y0, double r1, double r2,
                               const std::vector<EtaFunction>& etas, const PoletskiOptions& options = {});

/// Re-evaluates the verdict of a report against a different eta list without
/// re-solving the modulus problem.
PoletskiReport with_etas(const PoletskiReport& report, const std::vector<EtaFunction>& etas, int rhs_resolution = 128);

struct BoundReport {
  MappingSpec mapping;
  ExtendedPoint y1;
  double eps1 = 0.0;
  double eps1_star = 0.0;
  std::optional<ModulusResult> lhs;  ///< absent when the bound is infinite
  double q_l1 = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// M(Gamma_f(y1, eps1, eps1*)) against ||Q||_1 / (eps1* - eps1)^n, with the L1
/// norm of Q taken over the whole image f(D).
BoundReport proof_bound_4C(const MappingSpec& f, const ExtendedPoint& y1, double eps1, double eps1_star,
                           const PoletskiOptions& options = {});

/// ||Q||_1 over f(D); throws HypothesisViolation when it is not finite.
double q_l1_over_image(const MappingSpec& f);

struct ContinuitySample {
  Vec x;
  double lhs = 0.0;         ///< |f(x) - f(x0)|
  double rhs_factor = 0.0;  ///< ||Q||_1^{1/n} / log^{1/n}(1 + r0/|x - x0|)
};

struct ContinuityReport {
  ExtendedPoint x0;
  double r0 = 0.0;
  std::vector<ContinuitySample> samples;
  double estimated_Cn = 0.0;
  double Q_l1_norm = 0.0;
};

struct ContinuityOptions {
  int sample_count = 200;
  std::uint64_t seed = 0;
  Mat rotation;  ///< optional orthogonal matrix applied to the sample directions
};

/// Empirical constant of |f(x) - f(x0)| <= C ||Q||_1^{1/n} / log^{1/n}(1 + r0/|x - x0|)
/// over samples with |x - x0| log-spaced on [1e-6 r0, r0].
ContinuityReport continuity_bound(const MappingSpec& f, const ExtendedPoint& x0, double r0,
                                  const ContinuityOptions& options = {});

struct SingularityReport {
  MappingSpec mapping;
  std::optional<LiftResult> tail_i;
  std::optional<LiftResult> tail_j;
  std::vector<double> separations;
  std::vector<double> moduli;
  double bound = 0.0;  ///< fixed ||Q||_1 / (eps1* - eps1)^n with eps1 = 0.25, eps1* = 0.5
  bool strictly_increasing = false;
  std::optional<double> crossover;               ///< first separation whose modulus exceeds the bound
  std::optional<double> extrapolated_crossover;  ///< from a fit M ~ a + b log(1/s)
  double fit_slope = 0.0;
  std::vector<ExtendedPoint> cluster_points;
  bool vacuous = false;  ///< f has a single limit point at x0
  std::string note;
};

struct SingularityOptions {
  int resolution = 256;
  SolverOptions solver = scenario_solver_defaults();
  BlowupGeometry geometry;
  std::uint64_t seed = 0;
};

/// Two image tails lifted into the puncture, the blow-up modulus sequence over
/// `separations`, and the fixed proof bound it eventually exceeds.
SingularityReport singularity_scenario(const MappingSpec& f, const std::vector<double>& separations,
                                       const SingularityOptions& options = {});

nlohmann::json to_json(const ExtendedPoint& p);
nlohmann::json to_json(const MappingSpec& f);
nlohmann::json to_json(const PoletskiReport& r);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const ContinuityReport& r);
nlohmann::json to_json(const SingularityReport& r);

struct TraceRow {
  std::string scenario;
  double parameter = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

/// CSV with columns scenario,parameter,lhs,rhs,slack.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);

}  // namespace modlab

#endif  // MODLAB_VERIFIER_HPP
