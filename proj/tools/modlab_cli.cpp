#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "modlab/experiment.hpp"

namespace {

struct Overrides {
  std::optional<int> grid;
  std::optional<double> tol;
  std::optional<long> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
};

void apply(modlab::Config& c, const Overrides& o) {
  auto num = [](auto v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  if (o.grid) c.set("solver", "grid", num(*o.grid));
  if (o.tol) c.set("solver", "tol", num(*o.tol));
  if (o.seed) c.set("solver", "seed", num(*o.seed));
  if (o.threads) c.set("solver", "threads", num(*o.threads));
  if (o.out_dir) c.set("output", "dir", *o.out_dir);
}

int execute(const std::string& path, const Overrides& o, bool sweep) {
  modlab::Config config;
  try {
    config = modlab::load_config(path);
    apply(config, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return modlab::kExitValidation;
  }
  const auto outcome = sweep ? modlab::run_sweep(config) : modlab::run_experiment(config);
  const std::string dir = config.get("output", "dir").value_or("modlab_out");
  if (outcome.exit_code != modlab::kExitValidation) {
    try {
      modlab::write_outputs(outcome, config, dir);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return modlab::kExitValidation;
    }
  }
  if (outcome.exit_code == modlab::kExitOk) {
    std::cout << "ok: wrote " << dir << "/report.json\n";
  } else {
    std::cerr << (outcome.exit_code == modlab::kExitViolation ? "violation: " : "error: ") << outcome.message << '\n';
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modlab: conformal modulus experiments and inverse Poletski checks"};
  app.set_version_flag("--version", MODLAB_VERSION);
  app.require_subcommand(1);

  Overrides o;
  app.add_option("--grid", o.grid, "Override solver.grid (cells per axis)");
  app.add_option("--tol", o.tol, "Override solver.tol");
  app.add_option("--seed", o.seed, "Override solver.seed");
  app.add_option("--threads", o.threads, "Override solver.threads");
  app.add_option("--out-dir", o.out_dir, "Override output.dir");

  std::string run_path, sweep_path;
  auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
  run->add_option("config", run_path, "Config file")->required();
  auto* sweep = app.add_subcommand("sweep", "Run a config once per value of its [sweep] entry");
  sweep->add_option("config", sweep_path, "Config file")->required();
  app.add_subcommand("print-defaults", "Print a sample config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : modlab::kExitValidation;
  }

  if (*run) return execute(run_path, o, false);
  if (*sweep) return execute(sweep_path, o, true);
  std::cout << modlab::to_ini(modlab::default_config());
  return 0;
}
