#ifndef MODLAB_EXPERIMENT_HPP
#define MODLAB_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "modlab/verifier.hpp"

namespace modlab {

/// Raw config: flat `[section]` blocks of `key = value` lines.
struct Config {
  using Section = std::map<std::string, std::string>;
  std::map<std::string, Section> sections;
  std::map<std::string, int> lines;  ///< "section.key" -> source line
  std::string source = "<config>";

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  /// "source:line" for a key, or the bare source name.
  std::string where(const std::string& section, const std::string& key) const;
};

/// Parses the config grammar; unknown sections or keys and malformed lines
/// raise InputError naming the line.
Config parse_config(std::istream& is, const std::string& source = "<config>");
Config load_config(const std::string& path);
std::string to_ini(const Config& config);

/// The sample configuration printed by `print-defaults`.
Config default_config();

enum class ScenarioKind { ring_modulus, discrete_modulus, poletski, bound_4C, continuity, blowup, cluster_set };
std::string_view to_string(ScenarioKind kind);

/// Typed view of a Config.
struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::poletski;
  std::optional<MappingSpec> mapping;
  int dim = 2;
  std::optional<Vec> y0;
  double r1 = 0.25;
  double r2 = 0.5;
  std::optional<Vec> x0;
  double r0 = 0.25;
  double eps0 = 0.5;
  double eps1 = 0.25;
  double eps1_star = 0.5;
  std::vector<double> separations;
  std::vector<double> radii;
  double delta_c = 0.05;
  std::vector<std::string> etas{"uniform", "inverse_log", "power_law"};
  double power_exponent = -0.5;
  std::string family = "radial";
  std::string family_file;

  int grid = 256;
  double tol = 1e-3;
  long max_iterations = 100000;
  std::uint64_t seed = 0;
  int threads = 1;
  int count = 512;
  int add_per_round = 32;
  int sample_count = 200;
  int rhs_grid = 128;
  int lift_vertices = 64;
  std::optional<double> p;

  std::string out_dir = "modlab_out";

  SolverOptions solver() const;
};

/// Validates and interprets a Config (radii ordered, memory guard on the grid).
ExperimentConfig interpret(const Config& config);

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitSolver = 2, kExitViolation = 3 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  nlohmann::json report;
  std::vector<TraceRow> trace;
  std::optional<GridDensity> density;
};

/// Runs the configured scenario. Failures become exit codes, never exceptions.
RunOutcome run_experiment(const Config& config);

/// Runs once per value of the single `[sweep]` key (`section.key = v1, v2, ...`);
/// the trace gets one summary row per value.
RunOutcome run_sweep(const Config& config);

/// Writes report.json, trace.csv, config_echo.ini and (when present) density.csv.
void write_outputs(const RunOutcome& outcome, const Config& config, const std::string& out_dir);

}  // namespace modlab

#endif  // MODLAB_EXPERIMENT_HPP
