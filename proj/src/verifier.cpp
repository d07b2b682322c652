#include "modlab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace modlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

nlohmann::json vec_json(const Vec& v) { return std::vector<double>(v.begin(), v.end()); }

const Vec& finite_center(const ExtendedPoint& y, const char* who) {
  if (y.is_infinite()) throw InputError(std::string(who) + ": the ring centre must be finite");
  return y.coords();
}

}  // namespace

SolverOptions scenario_solver_defaults() {
  SolverOptions o;
  o.add_per_round = 32;
  return o;
}

// ---------------------------------------------------------------- Gamma_f

CurveFamily build_gamma_f(const MappingSpec& f, const ExtendedPoint& y0, double r1, double r2, int count,
                          const GammaOptions& options) {
  const Vec& c = finite_center(y0, "build_gamma_f");
  if (c.size() != f.dim) throw InputError("build_gamma_f: y0 dimension differs from the mapping's");
  if (count < 1) throw InputError("build_gamma_f: count must be >= 1");
  if (options.lift_vertices < 2) throw InputError("build_gamma_f: lift_vertices must be >= 2");
  const SphericalRing ring(c, r1, r2);
  const auto image = generate_ring_family(ring, count, options.kind);
  CurveFamily out;
  std::ostringstream label;
  label << "lifts through " << f.describe() << " of " << image.label;
  out.label = label.str();
  for (std::size_t i = 0; i < image.size(); ++i) {
    const Curve curve = image.curves[i].size() >= static_cast<std::size_t>(options.lift_vertices)
                            ? image.curves[i]
                            : resample(image.curves[i], options.lift_vertices);
    for (const auto& start : preimages(f, curve.front())) {
      try {
        auto lift = lift_curve(f, curve, start);
        if (lift.status == LiftStatus::completed) out.curves.push_back(std::move(lift.curve));
      } catch (const LiftingAmbiguity& e) {
        throw LiftingAmbiguity("image curve " + std::to_string(i) + ": " + e.what());
      } catch (const DomainError&) {
        // The image curve leaves f(D) immediately; its lifts are not in Gamma_f.
      }
    }
  }
  if (out.empty()) throw DomainError("build_gamma_f: no image curve of the ring lifts inside the domain");
  return out;
}

GridSpec bounding_grid(const CurveFamily& family, int resolution) {
  if (family.empty()) throw InputError("bounding_grid: empty family");
  const int n = family.dim();
  Vec lo = Vec::Constant(n, kInf), hi = Vec::Constant(n, -kInf);
  for (const auto& c : family.curves)
    for (const auto& v : c.vertices()) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  const Vec mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo).maxCoeff();
  return GridSpec::centered(mid, half * (1.0 + 1e-9) + 1e-12, resolution);
}

std::vector<EtaFunction> default_eta_library(double r1, double r2) {
  return {uniform_eta(r1, r2), EtaFunction::inverse_log(r1, r2), EtaFunction::power_law(-0.5, r1, r2)};
}

// ---------------------------------------------------------------- Poletski

namespace {

void judge(PoletskiReport& r) {
  double min_rhs = kInf;
  for (const auto& [eta, rhs] : r.rhs_per_eta) min_rhs = std::min(min_rhs, rhs);
  r.satisfied = r.lhs.value <= min_rhs * (1.0 + kInequalityTolerance);
  r.slack = min_rhs - r.lhs.value;
}

std::vector<std::pair<EtaFunction, double>> rhs_values(const MappingSpec& f, const SphericalRing& ring,
                                                       const WeightQ& q, const std::vector<EtaFunction>& etas,
                                                       int rhs_resolution) {
  if (etas.empty()) throw InputError("verify_poletski: the eta list is empty");
  for (const auto& eta : etas)
    if (!admissible_check(eta, ring.r_inner(), ring.r_outer()).admissible)
      throw InputError("verify_poletski: eta " + eta.describe() + " is not admissible on (r1, r2)");
  const Indicator mask = [&f](const Vec& y) { return !preimages(f, y).empty(); };
  std::vector<std::pair<EtaFunction, double>> out;
  for (const auto& eta : etas)
    out.emplace_back(eta, weighted_rhs_integral(q.field(), eta, ring, mask, f.dim, rhs_resolution));
  return out;
}

}  // namespace

PoletskiReport verify_poletski(const MappingSpec& f, const ExtendedPoint& y0, double r1, double r2,
                               const std::vector<EtaFunction>& etas, const PoletskiOptions& options) {
  validate(f);
  const SphericalRing ring(finite_center(y0, "verify_poletski"), r1, r2);
  const auto q = weight_q(f, ring);
  auto rhs = rhs_values(f, ring, q, etas, options.rhs_resolution);
  const auto family = build_gamma_f(f, y0, r1, r2, options.count, options.gamma);
  const auto grid = bounding_grid(family, options.resolution);
  auto lhs = discrete_modulus(family, grid, f.dim, options.solver);
  PoletskiReport r{.mapping = f,
                   .y0 = y0,
                   .r1 = r1,
                   .r2 = r2,
                   .lhs = std::move(lhs),
                   .rhs_per_eta = std::move(rhs),
                   .q = q};
  judge(r);
  return r;
}

PoletskiReport with_etas(const PoletskiReport& report, const std::vector<EtaFunction>& etas, int rhs_resolution) {
  PoletskiReport r = report;
  const SphericalRing ring(finite_center(report.y0, "with_etas"), report.r1, report.r2);
  r.rhs_per_eta = rhs_values(report.mapping, ring, report.q, etas, rhs_resolution);
  judge(r);
  return r;
}

// ---------------------------------------------------------------- bound (4C)

double q_l1_over_image(const MappingSpec& f) {
  const auto w = weight_q(f, EuclideanBall{f.center, kInf});
  if (!std::isfinite(w.l1_norm))
    throw HypothesisViolation("||Q||_1 over f(D) is not finite for " + f.describe());
  return w.l1_norm;
}

BoundReport proof_bound_4C(const MappingSpec& f, const ExtendedPoint& y1, double eps1, double eps1_star,
                           const PoletskiOptions& options) {
  validate(f);
  finite_center(y1, "proof_bound_4C");
  if (!(eps1 > 0.0) || !(eps1_star > eps1)) throw InputError("proof_bound_4C: require 0 < eps1 < eps1*");
  BoundReport r;
  r.mapping = f;
  r.y1 = y1;
  r.eps1 = eps1;
  r.eps1_star = eps1_star;
  r.q_l1 = q_l1_over_image(f);
  r.bound = r.q_l1 / std::pow(eps1_star - eps1, f.dim);
  if (!std::isfinite(r.bound)) {
    r.holds = true;
    return r;
  }
  const auto family = build_gamma_f(f, y1, eps1, eps1_star, options.count, options.gamma);
  r.lhs = discrete_modulus(family, bounding_grid(family, options.resolution), f.dim, options.solver);
  r.holds = r.lhs->value <= r.bound * (1.0 + kInequalityTolerance);
  return r;
}

// ---------------------------------------------------------------- continuity

namespace {

std::vector<Vec> seeded_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  if (n == 2) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < count; ++i) {
      const double t = angle(rng);
      out.push_back((Vec(2) << std::cos(t), std::sin(t)).finished());
    }
    return out;
  }
  std::normal_distribution<double> g;
  for (int i = 0; i < count; ++i) {
    Vec v(n);
    do {
      for (int d = 0; d < n; ++d) v[d] = g(rng);
    } while (v.norm() < 1e-12);
    out.push_back(v.normalized());
  }
  return out;
}

}  // namespace

ContinuityReport continuity_bound(const MappingSpec& f, const ExtendedPoint& x0, double r0,
                                  const ContinuityOptions& options) {
  validate(f);
  if (x0.is_infinite() || x0.dim() != f.dim || (x0.coords() - f.center).norm() > 0.0)
    throw InputError("continuity_bound: x0 must be the puncture of the mapping");
  if (!(r0 > 0.0)) throw InputError("continuity_bound: r0 must be positive");
  if (!(2.0 * r0 < f.epsilon0)) throw HypothesisViolation("continuity_bound: need 2 r0 < dist(x0, boundary of D)");
  if (options.sample_count < 2) throw InputError("continuity_bound: sample_count must be >= 2");
  const int n = f.dim;
  if (options.rotation.size() != 0 && (options.rotation.rows() != n || options.rotation.cols() != n))
    throw InputError("continuity_bound: rotation must be an n x n matrix");
  const auto limit = limit_at_puncture(f);
  if (limit.is_infinite()) throw HypothesisViolation("continuity_bound: f tends to infinity at x0");
  const Vec& y_star = limit.coords();

  ContinuityReport r;
  r.x0 = x0;
  r.r0 = r0;
  r.Q_l1_norm = q_l1_over_image(f);
  const double q_root = std::pow(r.Q_l1_norm, 1.0 / n);
  const auto dirs = seeded_directions(n, options.sample_count, options.seed);
  const int m = options.sample_count;
  for (int j = 0; j < m; ++j) {
    const double rho = r0 * std::pow(10.0, -6.0 * (1.0 - static_cast<double>(j) / (m - 1)));
    const Vec dir = options.rotation.size() ? Vec(options.rotation * dirs[static_cast<std::size_t>(j)])
                                            : dirs[static_cast<std::size_t>(j)];
    const Vec x = f.center + rho * dir;
    const double log_root = std::pow(std::log1p(r0 / rho), 1.0 / n);
    const double lhs = (evaluate(f, x) - y_star).norm();
    r.samples.push_back({x, lhs, q_root / log_root});
    r.estimated_Cn = std::max(r.estimated_Cn, lhs * log_root / q_root);
  }
  return r;
}

// ---------------------------------------------------------------- singularity

namespace {

LiftResult tail_into_puncture(const MappingSpec& f, const Vec& x1) {
  const auto shell = image_shell(f);
  const Vec y1 = evaluate(f, x1);
  constexpr int kVerts = 64;
  std::vector<Vec> pts;
  if (shell.puncture_inside) {
    for (int j = 0; j < kVerts; ++j) pts.push_back(y1 + (shell.center - y1) * (static_cast<double>(j) / (kVerts - 1)));
  } else {
    // The puncture goes to infinity: follow the ray through f(x1) geometrically.
    const Vec d = y1 - shell.center;
    const double growth = 1e12 / d.norm();
    for (int j = 0; j < kVerts; ++j)
      pts.push_back(shell.center + d * std::pow(growth, static_cast<double>(j) / (kVerts - 1)));
  }
  return lift_curve(f, Curve(std::move(pts)), x1);
}

}  // namespace

SingularityReport singularity_scenario(const MappingSpec& f, const std::vector<double>& separations,
                                       const SingularityOptions& options) {
  validate(f);
  if (separations.empty()) throw InputError("singularity_scenario: no separations");
  for (std::size_t i = 0; i < separations.size(); ++i) {
    if (!(separations[i] > 0.0)) throw InputError("singularity_scenario: separations must be positive");
    if (i > 0 && !(separations[i] < separations[i - 1]))
      throw InputError("singularity_scenario: separations must decrease");
  }
  SingularityReport r;
  r.mapping = f;
  r.separations = separations;
  const int n = f.dim;
  const double reach = std::min(f.epsilon0, 1.0);

  Vec e1 = Vec::Zero(n), e2 = Vec::Zero(n);
  e1[0] = 1.0;
  e2[0] = std::cos(1.0);
  e2[1] = std::sin(1.0);
  r.tail_i = tail_into_puncture(f, f.center + 0.5 * reach * e1);
  r.tail_j = tail_into_puncture(f, f.center + 0.5 * reach * e2);

  for (double s : separations) r.moduli.push_back(blowup_experiment(s, options.resolution, options.solver, options.geometry));
  r.strictly_increasing = true;
  for (std::size_t i = 1; i < r.moduli.size(); ++i)
    if (!(r.moduli[i] > r.moduli[i - 1])) r.strictly_increasing = false;

  try {
    r.bound = q_l1_over_image(f) / std::pow(0.5 - 0.25, n);
  } catch (const HypothesisViolation&) {
    r.bound = kInf;
  }
  for (std::size_t i = 0; i < r.moduli.size(); ++i)
    if (r.moduli[i] > r.bound) {
      r.crossover = separations[i];
      break;
    }
  if (r.moduli.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(r.moduli.size());
    for (std::size_t i = 0; i < r.moduli.size(); ++i) {
      const double x = std::log(1.0 / separations[i]);
      sx += x;
      sy += r.moduli[i];
      sxx += x * x;
      sxy += x * r.moduli[i];
    }
    r.fit_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - r.fit_slope * sx) / m;
    if (!r.crossover && r.fit_slope > 0.0 && std::isfinite(r.bound))
      r.extrapolated_crossover = std::exp(-(r.bound - intercept) / r.fit_slope);
  }

  r.cluster_points = cluster_set_estimate(f, f.center, {0.1 * reach, 0.01 * reach, 1e-3 * reach, 1e-4 * reach}, 64,
                                          0.05, options.seed);
  r.vacuous = r.cluster_points.size() <= 1;
  std::ostringstream note;
  if (r.vacuous)
    note << "f has a single limit point at x0, so the two-limit-point hypothesis of the contradiction is vacuous; ";
  if (r.crossover) note << "modulus exceeds the fixed bound at separation " << *r.crossover;
  else if (r.extrapolated_crossover)
    note << "bound not reached on the given separations; log-linear extrapolation crosses it at separation "
         << *r.extrapolated_crossover;
  else note << "no crossover reached or extrapolated";
  r.note = note.str();
  return r;
}

// ---------------------------------------------------------------- reports

nlohmann::json to_json(const ExtendedPoint& p) {
  if (p.is_infinite()) return "inf";
  return vec_json(p.coords());
}

nlohmann::json to_json(const MappingSpec& f) {
  nlohmann::json j{{"kind", std::string(to_string(f.kind))},
                   {"dim", f.dim},
                   {"center", vec_json(f.center)},
                   {"epsilon0", num(f.epsilon0)},
                   {"description", f.describe()}};
  if (f.kind == MappingKind::winding) j["k"] = f.k;
  if (f.kind == MappingKind::radial_stretch) j["alpha"] = f.alpha;
  if (f.kind == MappingKind::composition) {
    j["parts"] = nlohmann::json::array();
    for (const auto& p : f.parts) j["parts"].push_back(to_json(p));
  }
  return j;
}

namespace {

nlohmann::json weight_json(const WeightQ& q) {
  return {{"Q", num(q.value)},
          {"multiplicity", q.multiplicity},
          {"max_distortion", num(q.max_distortion)},
          {"l1_norm", num(q.l1_norm)},
          {"region_volume", num(q.region_volume)}};
}

}  // namespace

nlohmann::json to_json(const PoletskiReport& r) {
  nlohmann::json rhs = nlohmann::json::array();
  for (const auto& [eta, v] : r.rhs_per_eta) rhs.push_back({{"eta", eta.describe()}, {"rhs", num(v)}});
  return {{"mapping", to_json(r.mapping)},
          {"y0", to_json(r.y0)},
          {"r1", r.r1},
          {"r2", r.r2},
          {"lhs", to_json(r.lhs)},
          {"rhs_per_eta", rhs},
          {"weight", weight_json(r.q)},
          {"tolerance", kInequalityTolerance},
          {"satisfied", r.satisfied},
          {"slack", num(r.slack)}};
}

nlohmann::json to_json(const BoundReport& r) {
  return {{"mapping", to_json(r.mapping)},
          {"y1", to_json(r.y1)},
          {"eps1", r.eps1},
          {"eps1_star", r.eps1_star},
          {"lhs", r.lhs ? to_json(*r.lhs) : nlohmann::json(nullptr)},
          {"q_l1", num(r.q_l1)},
          {"bound", num(r.bound)},
          {"tolerance", kInequalityTolerance},
          {"holds", r.holds}};
}

nlohmann::json to_json(const ContinuityReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"x", vec_json(s.x)}, {"lhs", s.lhs}, {"rhs_factor", num(s.rhs_factor)}});
  return {{"x0", to_json(r.x0)},
          {"r0", r.r0},
          {"estimated_Cn", num(r.estimated_Cn)},
          {"Q_l1_norm", num(r.Q_l1_norm)},
          {"samples", samples}};
}

nlohmann::json to_json(const SingularityReport& r) {
  auto tail = [](const std::optional<LiftResult>& t) -> nlohmann::json {
    if (!t) return nullptr;
    return {{"status", std::string(to_string(t->status))},
            {"lifted_vertices", t->lifted_vertices},
            {"end", vec_json(t->curve.back())}};
  };
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& p : r.cluster_points) clusters.push_back(to_json(p));
  nlohmann::json moduli = nlohmann::json::array();
  for (double m : r.moduli) moduli.push_back(num(m));
  return {{"mapping", to_json(r.mapping)},
          {"tail_i", tail(r.tail_i)},
          {"tail_j", tail(r.tail_j)},
          {"separations", r.separations},
          {"moduli", moduli},
          {"bound", num(r.bound)},
          {"strictly_increasing", r.strictly_increasing},
          {"crossover", r.crossover ? nlohmann::json(*r.crossover) : nlohmann::json(nullptr)},
          {"extrapolated_crossover",
           r.extrapolated_crossover ? num(*r.extrapolated_crossover) : nlohmann::json(nullptr)},
          {"fit_slope", num(r.fit_slope)},
          {"cluster_points", clusters},
          {"vacuous", r.vacuous},
          {"note", r.note}};
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "scenario,parameter,lhs,rhs,slack\n";
  for (const auto& r : rows) os << r.scenario << ',' << r.parameter << ',' << r.lhs << ',' << r.rhs << ',' << r.slack << '\n';
  os.precision(old);
}

}  // namespace modlab
