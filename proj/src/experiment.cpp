#include "modlab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#ifndef MODLAB_VERSION
#define MODLAB_VERSION "0.0.0"
#endif

namespace modlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario", {"kind"}},
      {"mapping", {"kind", "k", "alpha", "center", "epsilon0", "dim", "parts"}},
      {"geometry",
       {"dim", "y0", "r1", "r2", "x0", "r0", "eps0", "eps1", "eps1_star", "separations", "radii", "delta_c", "etas",
        "power_exponent", "family", "family_file"}},
      {"solver",
       {"grid", "tol", "max_iterations", "seed", "threads", "count", "add_per_round", "sample_count", "rhs_grid",
        "lift_vertices", "p"}},
      {"output", {"dir"}},
      {"sweep", {}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- raw config

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) return std::nullopt;
  auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections[section][key] = value;
}

std::string Config::where(const std::string& section, const std::string& key) const {
  auto it = lines.find(section + "." + key);
  if (it == lines.end()) return source;
  return source + ":" + std::to_string(it->second);
}

Config parse_config(std::istream& is, const std::string& source) {
  Config c;
  c.source = source;
  std::string line, section;
  int number = 0;
  auto fail = [&](const std::string& what) { throw InputError(source + ":" + std::to_string(number) + ": " + what); };
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().contains(section)) fail("unknown section [" + section + "]");
      c.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + line + "'");
    if (section.empty()) fail("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    const auto& allowed = known_keys().at(section);
    if (section == "sweep") {
      const auto dot = key.find('.');
      if (dot == std::string::npos || !known_keys().contains(key.substr(0, dot)) ||
          !known_keys().at(key.substr(0, dot)).contains(key.substr(dot + 1)))
        fail("sweep key must name a config field as section.key, got '" + key + "'");
    } else if (!allowed.contains(key)) {
      fail("unknown key '" + key + "' in [" + section + "]");
    }
    if (c.sections[section].contains(key)) fail("duplicate key '" + key + "' in [" + section + "]");
    c.sections[section][key] = value;
    c.lines[section + "." + key] = number;
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open config file");
  return parse_config(in, path);
}

std::string to_ini(const Config& config) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, section] : config.sections) {
    if (!first) os << '\n';
    first = false;
    os << '[' << name << "]\n";
    for (const auto& [k, v] : section) os << k << " = " << v << '\n';
  }
  return os.str();
}

Config default_config() {
  std::istringstream is(R"([scenario]
kind = poletski

[mapping]
kind = winding
k = 3
epsilon0 = 1

[geometry]
dim = 2
y0 = 0,0
r1 = 0.25
r2 = 0.5
etas = uniform,inverse_log,power_law

[solver]
grid = 256
tol = 1e-3
max_iterations = 100000
seed = 0
threads = 1
count = 512
add_per_round = 32

[output]
dir = modlab_out
)");
  return parse_config(is, "<defaults>");
}

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::ring_modulus: return "ring_modulus";
    case ScenarioKind::discrete_modulus: return "discrete_modulus";
    case ScenarioKind::poletski: return "poletski";
    case ScenarioKind::bound_4C: return "bound_4C";
    case ScenarioKind::continuity: return "continuity";
    case ScenarioKind::blowup: return "blowup";
    case ScenarioKind::cluster_set: return "cluster_set";
  }
  return "unknown";
}

// ---------------------------------------------------------------- typed view

SolverOptions ExperimentConfig::solver() const {
  SolverOptions o;
  o.tol = tol;
  o.max_iterations = max_iterations;
  o.threads = threads;
  o.add_per_round = add_per_round;
  return o;
}

namespace {

class Reader {
 public:
  explicit Reader(const Config& c) : c_(c) {}

  [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& what) const {
    throw InputError(c_.where(sec, key) + ": " + sec + "." + key + ": " + what);
  }

  double real(const std::string& sec, const std::string& key, double fallback) const {
    auto v = c_.get(sec, key);
    return v ? to_real(sec, key, *v) : fallback;
  }

  long integer(const std::string& sec, const std::string& key, long fallback) const {
    auto v = c_.get(sec, key);
    if (!v) return fallback;
    const double d = to_real(sec, key, *v);
    if (d != std::floor(d) || std::abs(d) > 9e15) fail(sec, key, "must be an integer");
    return static_cast<long>(d);
  }

  std::vector<double> reals(const std::string& sec, const std::string& key) const {
    std::vector<double> out;
    if (auto v = c_.get(sec, key))
      for (const auto& tok : split_list(*v)) out.push_back(to_real(sec, key, tok));
    return out;
  }

  std::optional<Vec> point(const std::string& sec, const std::string& key, int dim) const {
    auto v = c_.get(sec, key);
    if (!v) return std::nullopt;
    const auto xs = reals(sec, key);
    if (static_cast<int>(xs.size()) != dim) fail(sec, key, "expected " + std::to_string(dim) + " coordinates");
    return Eigen::Map<const Vec>(xs.data(), dim);
  }

  std::string text(const std::string& sec, const std::string& key, const std::string& fallback) const {
    auto v = c_.get(sec, key);
    return v ? *v : fallback;
  }

 private:
  double to_real(const std::string& sec, const std::string& key, const std::string& s) const {
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
      std::size_t pos = 0;
      const double d = std::stod(s, &pos);
      if (pos == s.size()) return d;
    } catch (const std::exception&) {
    }
    fail(sec, key, "not a number: '" + s + "'");
  }

  const Config& c_;
};

}  // namespace

ExperimentConfig interpret(const Config& config) {
  const Reader rd(config);
  ExperimentConfig e;
  const std::string kind = rd.text("scenario", "kind", "");
  if (kind.empty()) rd.fail("scenario", "kind", "missing");
  bool found = false;
  for (auto k : {ScenarioKind::ring_modulus, ScenarioKind::discrete_modulus, ScenarioKind::poletski,
                 ScenarioKind::bound_4C, ScenarioKind::continuity, ScenarioKind::blowup, ScenarioKind::cluster_set})
    if (to_string(k) == kind) {
      e.scenario = k;
      found = true;
    }
  if (!found) rd.fail("scenario", "kind", "unknown scenario '" + kind + "'");

  e.dim = static_cast<int>(rd.integer("geometry", "dim", 2));
  if (e.dim < 2) rd.fail("geometry", "dim", "must be >= 2");

  if (auto it = config.sections.find("mapping"); it != config.sections.end() && !it->second.empty()) {
    auto params = it->second;
    if (!params.contains("dim")) params["dim"] = std::to_string(e.dim);
    try {
      e.mapping = parse_mapping(params);
    } catch (const InputError& err) {
      std::string msg = err.what();
      std::string key = "kind";
      if (msg.rfind("mapping.", 0) == 0) key = msg.substr(8, msg.find(':') - 8);
      throw InputError(config.where("mapping", key) + ": " + msg);
    }
    if (e.mapping->dim != e.dim) rd.fail("mapping", "dim", "differs from geometry.dim");
  }

  e.y0 = rd.point("geometry", "y0", e.dim);
  e.x0 = rd.point("geometry", "x0", e.dim);
  e.r1 = rd.real("geometry", "r1", e.r1);
  e.r2 = rd.real("geometry", "r2", e.r2);
  if (!(e.r1 > 0.0)) rd.fail("geometry", "r1", "must be positive");
  if (!(e.r1 < e.r2)) rd.fail("geometry", "r1", "must be smaller than geometry.r2");
  if (!std::isfinite(e.r2)) rd.fail("geometry", "r2", "must be finite");
  e.r0 = rd.real("geometry", "r0", e.r0);
  if (!(e.r0 > 0.0)) rd.fail("geometry", "r0", "must be positive");
  e.eps0 = rd.real("geometry", "eps0", e.eps0);
  if (!(e.eps0 > 0.0) || !std::isfinite(e.eps0)) rd.fail("geometry", "eps0", "must be positive and finite");
  e.eps1 = rd.real("geometry", "eps1", e.eps1);
  e.eps1_star = rd.real("geometry", "eps1_star", e.eps1_star);
  if (!(e.eps1 > 0.0)) rd.fail("geometry", "eps1", "must be positive");
  if (!(e.eps1 < e.eps1_star)) rd.fail("geometry", "eps1", "must be smaller than geometry.eps1_star");
  e.separations = rd.reals("geometry", "separations");
  e.radii = rd.reals("geometry", "radii");
  e.delta_c = rd.real("geometry", "delta_c", e.delta_c);
  if (!(e.delta_c > 0.0)) rd.fail("geometry", "delta_c", "must be positive");
  if (auto v = config.get("geometry", "etas")) e.etas = split_list(*v);
  for (const auto& name : e.etas)
    if (name != "uniform" && name != "inverse_log" && name != "power_law")
      rd.fail("geometry", "etas", "unknown eta '" + name + "' (uniform, inverse_log, power_law)");
  e.power_exponent = rd.real("geometry", "power_exponent", e.power_exponent);
  e.family = rd.text("geometry", "family", e.family);
  e.family_file = rd.text("geometry", "family_file", "");

  e.grid = static_cast<int>(rd.integer("solver", "grid", e.grid));
  if (e.grid < 2) rd.fail("solver", "grid", "must be >= 2");
  if (e.dim == 2 && e.grid > 2048) rd.fail("solver", "grid", "exceeds the memory guard of 2048^2 cells");
  if (e.dim == 3 && e.grid > 96) rd.fail("solver", "grid", "exceeds the memory guard of 96^3 cells");
  if (e.dim > 3 && std::pow(e.grid, e.dim) > 96.0 * 96.0 * 96.0)
    rd.fail("solver", "grid", "exceeds the memory guard of 96^3 cells");
  e.tol = rd.real("solver", "tol", e.tol);
  if (!(e.tol > 0.0) || !(e.tol < 1.0)) rd.fail("solver", "tol", "must lie in (0, 1)");
  e.max_iterations = rd.integer("solver", "max_iterations", e.max_iterations);
  if (e.max_iterations < 1) rd.fail("solver", "max_iterations", "must be >= 1");
  const long seed = rd.integer("solver", "seed", 0);
  if (seed < 0) rd.fail("solver", "seed", "must be nonnegative");
  e.seed = static_cast<std::uint64_t>(seed);
  e.threads = static_cast<int>(rd.integer("solver", "threads", e.threads));
  if (e.threads < 1) rd.fail("solver", "threads", "must be >= 1");
  e.count = static_cast<int>(rd.integer("solver", "count", e.count));
  if (e.count < 1) rd.fail("solver", "count", "must be >= 1");
  e.add_per_round = static_cast<int>(rd.integer("solver", "add_per_round", e.add_per_round));
  if (e.add_per_round < 1) rd.fail("solver", "add_per_round", "must be >= 1");
  e.sample_count = static_cast<int>(rd.integer("solver", "sample_count", e.sample_count));
  if (e.sample_count < 2) rd.fail("solver", "sample_count", "must be >= 2");
  e.rhs_grid = static_cast<int>(rd.integer("solver", "rhs_grid", e.rhs_grid));
  if (e.rhs_grid < 4) rd.fail("solver", "rhs_grid", "must be >= 4");
  e.lift_vertices = static_cast<int>(rd.integer("solver", "lift_vertices", e.lift_vertices));
  if (e.lift_vertices < 2) rd.fail("solver", "lift_vertices", "must be >= 2");
  if (config.get("solver", "p")) {
    e.p = rd.real("solver", "p", 2.0);
    if (!(*e.p > 1.0)) rd.fail("solver", "p", "must exceed 1");
  }
  e.out_dir = rd.text("output", "dir", e.out_dir);

  const bool needs_mapping = e.scenario == ScenarioKind::poletski || e.scenario == ScenarioKind::bound_4C ||
                             e.scenario == ScenarioKind::continuity || e.scenario == ScenarioKind::cluster_set;
  if (needs_mapping && !e.mapping) rd.fail("mapping", "kind", "missing");
  if (e.scenario == ScenarioKind::blowup && e.separations.empty())
    rd.fail("geometry", "separations", "blowup needs at least one separation");
  if (e.scenario == ScenarioKind::cluster_set && e.radii.empty())
    rd.fail("geometry", "radii", "cluster_set needs decreasing sample radii");
  return e;
}

// ---------------------------------------------------------------- scenarios

namespace {

struct ScenarioResult {
  nlohmann::json result;
  std::vector<TraceRow> summary;  ///< one or more rows for sweep tables
  std::vector<TraceRow> trace;    ///< detailed rows for a single run
  std::optional<GridDensity> density;
  bool violated = false;
};

EtaFunction make_eta(const std::string& name, const ExperimentConfig& e) {
  if (name == "uniform") return uniform_eta(e.r1, e.r2);
  if (name == "inverse_log") return EtaFunction::inverse_log(e.r1, e.r2);
  return EtaFunction::power_law(e.power_exponent, e.r1, e.r2);
}

PoletskiOptions poletski_options(const ExperimentConfig& e) {
  PoletskiOptions o;
  o.resolution = e.grid;
  o.count = e.count;
  o.rhs_resolution = e.rhs_grid;
  o.solver = e.solver();
  o.gamma.lift_vertices = e.lift_vertices;
  if (e.family == "spiral") o.gamma.kind = RingFamilyKind::spiral;
  return o;
}

Vec center_or(const std::optional<Vec>& v, const ExperimentConfig& e) {
  if (v) return *v;
  if (e.mapping) return e.mapping->center;
  return Vec::Zero(e.dim);
}

ScenarioResult run_ring_modulus(const ExperimentConfig& e) {
  const Vec c = center_or(e.y0, e);
  const SphericalRing ring(c, e.r1, e.r2);
  const auto kind = e.family == "spiral" ? RingFamilyKind::spiral : RingFamilyKind::radial;
  const auto fam = generate_ring_family(ring, e.count, kind);
  const auto grid = GridSpec::centered(c, e.r2, e.grid);
  auto m = discrete_modulus(fam, grid, e.p.value_or(e.dim), e.solver());
  const double exact = ring_modulus_analytic(e.dim, e.r1, e.r2);
  ScenarioResult r;
  r.result = {{"analytic", exact},
              {"discrete", to_json(m)},
              {"relative_error", (m.value - exact) / exact},
              {"family", fam.label}};
  r.summary.push_back({"ring_modulus", static_cast<double>(e.count), m.value, exact, exact - m.value});
  r.trace = r.summary;
  r.density = std::move(m.density);
  return r;
}

ScenarioResult run_discrete_modulus(const ExperimentConfig& e) {
  CurveFamily fam;
  std::optional<GridSpec> grid;
  if (!e.family_file.empty()) {
    std::ifstream in(e.family_file);
    if (!in) throw InputError("geometry.family_file: cannot open '" + e.family_file + "'");
    fam = read_family(in);
  } else if (e.family == "rectangle") {
    // Curves joining the vertical sides of the unit square.
    fam.label = "horizontal segments joining the sides of the unit square";
    for (int i = 0; i < e.count; ++i) {
      const double y = (i + 0.5) / e.count;
      fam.curves.emplace_back(std::vector<Vec>{(Vec(2) << 0.0, y).finished(), (Vec(2) << 1.0, y).finished()});
    }
    grid = GridSpec::cube(Vec::Zero(2), Vec::Ones(2), e.grid);
  } else {
    throw InputError("geometry.family: discrete_modulus needs family = rectangle or a geometry.family_file");
  }
  if (!grid) grid = bounding_grid(fam, e.grid);
  auto m = discrete_modulus(fam, *grid, e.p.value_or(fam.dim()), e.solver());
  ScenarioResult r;
  r.result = {{"discrete", to_json(m)}, {"family", fam.label}};
  r.summary.push_back({"discrete_modulus", static_cast<double>(fam.size()), m.value, m.lower_bound,
                       m.value - m.lower_bound});
  r.trace = r.summary;
  r.density = std::move(m.density);
  return r;
}

ScenarioResult run_poletski(const ExperimentConfig& e) {
  const auto& f = *e.mapping;
  std::vector<EtaFunction> etas;
  for (const auto& name : e.etas) etas.push_back(make_eta(name, e));
  auto rep = verify_poletski(f, ExtendedPoint(center_or(e.y0, e)), e.r1, e.r2, etas, poletski_options(e));
  ScenarioResult r;
  r.result = to_json(rep);
  double min_rhs = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.rhs_per_eta.size(); ++i) {
    const double rhs = rep.rhs_per_eta[i].second;
    min_rhs = std::min(min_rhs, rhs);
    r.trace.push_back({"poletski:" + rep.rhs_per_eta[i].first.describe(), static_cast<double>(i), rep.lhs.value, rhs,
                       rhs - rep.lhs.value});
  }
  r.summary.push_back({"poletski", e.r2, rep.lhs.value, min_rhs, rep.slack});
  r.violated = !rep.satisfied;
  r.density = std::move(rep.lhs.density);
  return r;
}

ScenarioResult run_bound(const ExperimentConfig& e) {
  const auto& f = *e.mapping;
  auto rep = proof_bound_4C(f, ExtendedPoint(center_or(e.y0, e)), e.eps1, e.eps1_star, poletski_options(e));
  ScenarioResult r;
  r.result = to_json(rep);
  const double lhs = rep.lhs ? rep.lhs->value : kNaN;
  r.summary.push_back({"bound_4C", e.eps1_star - e.eps1, lhs, rep.bound, rep.bound - lhs});
  r.trace = r.summary;
  r.violated = !rep.holds;
  if (rep.lhs) r.density = std::move(rep.lhs->density);
  return r;
}

ScenarioResult run_continuity(const ExperimentConfig& e) {
  const auto& f = *e.mapping;
  ContinuityOptions o;
  o.sample_count = e.sample_count;
  o.seed = e.seed;
  auto rep = continuity_bound(f, ExtendedPoint(center_or(e.x0, e)), e.r0, o);
  ScenarioResult r;
  r.result = to_json(rep);
  for (const auto& s : rep.samples) {
    const double dist = (s.x - f.center).norm();
    r.trace.push_back({"continuity_sample", dist, s.lhs, s.rhs_factor, s.rhs_factor - s.lhs});
  }
  r.summary.push_back({"continuity", e.r0, rep.estimated_Cn, kNaN, kNaN});
  r.violated = !std::isfinite(rep.estimated_Cn);
  return r;
}

ScenarioResult run_blowup(const ExperimentConfig& e) {
  ScenarioResult r;
  BlowupGeometry geom;
  geom.eps0 = e.eps0;
  if (e.mapping) {
    SingularityOptions o;
    o.resolution = e.grid;
    o.solver = e.solver();
    o.geometry = geom;
    o.seed = e.seed;
    auto rep = singularity_scenario(*e.mapping, e.separations, o);
    r.result = to_json(rep);
    for (std::size_t i = 0; i < rep.moduli.size(); ++i)
      r.summary.push_back({"blowup", rep.separations[i], rep.moduli[i], rep.bound, rep.bound - rep.moduli[i]});
  } else {
    nlohmann::json moduli = nlohmann::json::array();
    for (double s : e.separations) {
      const double m = blowup_experiment(s, e.grid, e.solver(), geom);
      moduli.push_back(m);
      r.summary.push_back({"blowup", s, m, kNaN, kNaN});
    }
    r.result = {{"separations", e.separations}, {"moduli", moduli}, {"grid", e.grid}, {"eps0", e.eps0}};
  }
  r.trace = r.summary;
  return r;
}

ScenarioResult run_cluster_set(const ExperimentConfig& e) {
  const auto& f = *e.mapping;
  const auto pts = cluster_set_estimate(f, center_or(e.x0, e), e.radii, e.sample_count, e.delta_c, e.seed);
  ScenarioResult r;
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    arr.push_back(to_json(pts[i]));
    const double h = pts[i].is_infinite() ? 0.0 : chordal_to_infinity(pts[i].coords());
    r.summary.push_back({"cluster_point", static_cast<double>(i), h, kNaN, kNaN});
  }
  r.result = {{"mapping", to_json(f)}, {"cluster_points", arr}, {"radii", e.radii}, {"delta_c", e.delta_c}};
  r.trace = r.summary;
  return r;
}

ScenarioResult dispatch(const ExperimentConfig& e) {
  switch (e.scenario) {
    case ScenarioKind::ring_modulus: return run_ring_modulus(e);
    case ScenarioKind::discrete_modulus: return run_discrete_modulus(e);
    case ScenarioKind::poletski: return run_poletski(e);
    case ScenarioKind::bound_4C: return run_bound(e);
    case ScenarioKind::continuity: return run_continuity(e);
    case ScenarioKind::blowup: return run_blowup(e);
    case ScenarioKind::cluster_set: return run_cluster_set(e);
  }
  throw InputError("unknown scenario");
}

nlohmann::json config_json(const Config& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, section] : c.sections) j[name] = section;
  return j;
}

nlohmann::json report_header(const Config& c, std::uint64_t seed) {
  return {{"tool", "modlab"}, {"version", MODLAB_VERSION}, {"seed", seed}, {"config", config_json(c)}};
}

template <typename Fn>
int guarded(Fn&& fn, std::string& message) {
  try {
    return fn();
  } catch (const SolverBudgetExceeded& err) {
    message = err.what();
    return kExitSolver;
  } catch (const InputError& err) {
    message = err.what();
    return kExitValidation;
  } catch (const HypothesisViolation& err) {
    message = err.what();
    return kExitValidation;
  } catch (const std::exception& err) {
    message = err.what();
    return kExitSolver;
  }
}

}  // namespace

RunOutcome run_experiment(const Config& config) {
  RunOutcome out;
  std::uint64_t seed = 0;
  out.exit_code = guarded(
      [&] {
        const auto e = interpret(config);
        seed = e.seed;
        const auto t0 = std::chrono::steady_clock::now();
        auto res = dispatch(e);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report = report_header(config, seed);
        out.report["scenario"] = std::string(to_string(e.scenario));
        out.report["results"] = nlohmann::json::array({res.result});
        out.report["timings"] = {{"wall_seconds", wall}};
        out.trace = std::move(res.trace);
        out.density = std::move(res.density);
        if (res.violated) out.message = "inequality check failed";
        return res.violated ? kExitViolation : kExitOk;
      },
      out.message);
  if (out.report.is_null()) out.report = report_header(config, seed);
  out.report["exit_code"] = out.exit_code;
  out.report["message"] = out.message;
  return out;
}

RunOutcome run_sweep(const Config& config) {
  RunOutcome out;
  std::uint64_t seed = 0;
  out.exit_code = guarded(
      [&] {
        auto it = config.sections.find("sweep");
        if (it == config.sections.end() || it->second.empty())
          throw InputError(config.source + ": sweep needs a [sweep] section with one 'section.key = v1, v2, ...' entry");
        if (it->second.size() != 1)
          throw InputError(config.source + ": exactly one swept parameter is allowed, found " +
                           std::to_string(it->second.size()));
        const auto& [param, list] = *it->second.begin();
        const auto values = split_list(list);
        if (values.empty()) throw InputError(config.where("sweep", param) + ": sweep." + param + ": empty value list");
        const auto dot = param.find('.');
        const std::string sec = param.substr(0, dot), key = param.substr(dot + 1);

        Config base = config;
        base.sections.erase("sweep");
        const auto first = interpret(base);
        seed = first.seed;
        nlohmann::json records = nlohmann::json::array();
        int code = kExitOk;
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& v : values) {
          Config run = base;
          run.set(sec, key, v);
          const auto e = interpret(run);
          auto res = dispatch(e);
          double pv = kNaN;
          try {
            pv = std::stod(v);
          } catch (const std::exception&) {
          }
          for (auto row : res.summary) {
            row.parameter = pv;
            out.trace.push_back(row);
          }
          records.push_back({{"parameter", param}, {"value", v}, {"result", res.result}});
          if (res.violated) code = kExitViolation;
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report = report_header(config, seed);
        out.report["scenario"] = std::string(to_string(first.scenario));
        out.report["sweep"] = {{"parameter", param}, {"values", values}};
        out.report["results"] = records;
        out.report["timings"] = {{"wall_seconds", wall}};
        if (code == kExitViolation) out.message = "inequality check failed for at least one value";
        return code;
      },
      out.message);
  if (out.report.is_null()) out.report = report_header(config, seed);
  out.report["exit_code"] = out.exit_code;
  out.report["message"] = out.message;
  return out;
}

void write_outputs(const RunOutcome& outcome, const Config& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  {
    std::ofstream os(dir / "report.json");
    os << outcome.report.dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "trace.csv");
    write_trace_csv(os, outcome.trace);
  }
  {
    std::ofstream os(dir / "config_echo.ini");
    os << to_ini(config);
  }
  if (outcome.density) {
    std::ofstream os(dir / "density.csv");
    write_density_csv(os, *outcome.density);
  }
  if (!fs::exists(dir / "report.json")) throw InputError(out_dir + ": cannot write outputs");
}

}  // namespace modlab
