// Command-line driver for WG eigenvalue experiments.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wgeig/experiment.hpp"

using namespace wgeig;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> domain, pattern, schedule, out_dir, csv, plot_data, table;
  std::optional<int> k, k1, k2, nev, threads;
  std::optional<double> epsilon, tol, gamma;
  bool unlock_large = false;
};

void add_output_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--out-dir", o.out_dir, "Directory for output files");
  cmd->add_option("--csv", o.csv, "CSV file name inside the output directory");
  cmd->add_option("--plot-data", o.plot_data, "Plot data file name");
  cmd->add_option("--table", o.table, "Human-readable table file name");
  cmd->add_flag("--unlock-large", o.unlock_large, "Allow meshes below the desk-scale limit");
  cmd->add_option("--tol", o.tol, "Eigensolver residual tolerance");
  cmd->add_option("--threads", o.threads, "Threads for element assembly");
}

void add_problem_flags(CLI::App* cmd, Overrides& o, bool two_space) {
  cmd->add_option("--config", o.config, "Flat key = value configuration file");
  cmd->add_option("--domain", o.domain, "unit_square or l_shape");
  cmd->add_option("--pattern", o.pattern, "right_up, right_down or crisscross");
  if (two_space) {
    cmd->add_option("--k1", o.k1, "Low polynomial degree");
    cmd->add_option("--k2", o.k2, "High polynomial degree");
  } else {
    cmd->add_option("--k", o.k, "Polynomial degree");
  }
  cmd->add_option("--epsilon", o.epsilon, "Stabilisation exponent in [0, 1)");
  cmd->add_option("--schedule", o.schedule, "Levels, e.g. \"1/4,1/16;1/8,1/64\"");
  cmd->add_option("--nev", o.nev, "Number of eigenvalues");
  cmd->add_option("--gamma", o.gamma, "Override of the regularity exponent");
  add_output_flags(cmd, o);
}

ExperimentConfig apply(ExperimentConfig c, const Overrides& o) {
  if (o.domain) c.domain = parse_domain(*o.domain);
  if (o.pattern) {
    try {
      c.pattern = parse_pattern(*o.pattern);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (o.k) c.k = *o.k;
  if (o.k1) c.k1 = *o.k1;
  if (o.k2) c.k2 = *o.k2;
  if (o.epsilon) c.epsilon = *o.epsilon;
  if (o.schedule) c.schedule = parse_schedule(*o.schedule, c.algorithm);
  if (o.nev) c.nev = *o.nev;
  if (o.tol) c.tol = *o.tol;
  if (o.gamma) c.gamma = *o.gamma;
  if (o.threads) c.threads = *o.threads;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (o.csv) c.csv = *o.csv;
  if (o.plot_data) c.plot_data = *o.plot_data;
  if (o.table) c.table = *o.table;
  if (o.unlock_large) c.unlock_large = true;
  return c;
}

ExperimentConfig from_subcommand(Algorithm algorithm, const Overrides& o) {
  ExperimentConfig c;
  c.algorithm = algorithm;
  if (!o.config.empty()) {
    c = load_config(o.config, c);
    if (c.algorithm != algorithm)
      throw ConfigError("config file sets algorithm " + to_string(c.algorithm) +
                        " but the subcommand is " + to_string(algorithm));
  }
  return apply(c, o);
}

int run(const ExperimentConfig& config) {
  validate(config);
  const ExperimentResult result = run_experiment(config, &std::cerr);
  write_table(std::cout, result);
  write_outputs(result);
  return result.any_failure() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak Galerkin eigenvalue experiments for the Dirichlet Laplacian"};
  app.require_subcommand(1);

  Overrides direct_o, grid_o, space_o, preset_o;
  auto* direct = app.add_subcommand("direct", "Direct WG eigensolve on each level");
  add_problem_flags(direct, direct_o, false);
  auto* grid = app.add_subcommand("two-grid", "Coarse eigensolve plus one fine linear solve");
  add_problem_flags(grid, grid_o, false);
  auto* space = app.add_subcommand("two-space", "Low-degree eigensolve plus one high-degree solve");
  add_problem_flags(space, space_o, true);

  std::string preset_name;
  auto* pre = app.add_subcommand("preset", "Run a named experiment");
  pre->add_option("name", preset_name, "Preset name (see list-presets)")->required();
  pre->add_option("--nev", preset_o.nev, "Number of eigenvalues");
  add_output_flags(pre, preset_o);

  auto* list = app.add_subcommand("list-presets", "List the named experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*list) {
      for (const auto& name : preset_names())
        std::cout << name << "  " << preset_description(name) << "\n";
      return 0;
    }
    if (*direct) return run(from_subcommand(Algorithm::direct, direct_o));
    if (*grid) return run(from_subcommand(Algorithm::two_grid, grid_o));
    if (*space) return run(from_subcommand(Algorithm::two_space, space_o));
    if (*pre) return run(apply(preset(preset_name, preset_o.unlock_large), preset_o));
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
