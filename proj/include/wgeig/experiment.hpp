#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wgeig/analysis.hpp"
#include "wgeig/mesh.hpp"

namespace wgeig {

enum class Domain { unit_square, l_shape };
enum class Algorithm { direct, two_grid, two_space };

std::string to_string(Domain d);
std::string to_string(Algorithm a);
Domain parse_domain(const std::string& s);
Algorithm parse_algorithm(const std::string& s);

/// Invalid experiment configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One level of a schedule as grid divisions per unit length: H = 1/coarse,
/// h = 1/fine. Direct and two-space levels have coarse == fine.
struct Level {
  int coarse = 0;
  int fine = 0;
  bool operator==(const Level&) const = default;
};

struct ExperimentConfig {
  std::string name = "custom";
  Domain domain = Domain::unit_square;
  DiagonalPattern pattern = DiagonalPattern::right_up;
  Algorithm algorithm = Algorithm::direct;
  int k = 1;   // direct and two-grid degree
  int k1 = 1;  // two-space low degree
  int k2 = 2;  // two-space high degree
  double epsilon = 0.0;
  std::vector<Level> schedule;
  int nev = 6;
  double tol = 1e-10;
  double linear_tol = 1e-10;
  std::optional<double> gamma;
  std::string out_dir = ".";
  std::string csv = "results.csv";
  std::string plot_data = "plot.dat";
  std::string table = "table.txt";
  bool unlock_large = false;
  int threads = 1;
};

/// "1/4", "0.25" or "4" (a bare integer >= 2 is read as 1/n) -> 4.
int parse_mesh_size(const std::string& s);

/// "H,h;H,h" for the two-grid scheme, "h;h" (or "h,h") otherwise.
std::vector<Level> parse_schedule(const std::string& s, Algorithm algorithm);
std::string format_schedule(const std::vector<Level>& schedule, Algorithm algorithm);

/// Applies flat `key = value` lines ('#' starts a comment) on top of `base`.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Finest h allowed without unlock_large: 1/256 for degree 1, 1/64 above.
int desk_scale_limit(int degree);

/// Throws ConfigError on invalid or over-sized configurations.
void validate(const ExperimentConfig& config);

std::vector<std::string> preset_names();
std::string preset_description(const std::string& name);
/// With unlock_large the full published schedule is used where it exceeds the
/// desk-scale limit.
ExperimentConfig preset(const std::string& name, bool unlock_large = false);

struct LevelResult {
  Level level;
  bool ok = true;
  std::string error;
  std::vector<double> lambda;     // approximate eigenvalues
  std::vector<double> exact;      // NaN when unknown
  std::vector<double> eig_error;  // exact - approx, NaN when unknown
  std::vector<double> fun_error;  // |||Q_h u - u_approx|||, NaN when unknown
  double wall_coarse = 0.0;
  double wall_fine = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<LevelResult> levels;
  OrderModel model;

  bool any_failure() const;
  /// Mesh size used for orders: H for two-grid, h otherwise.
  double order_size(std::size_t level) const;
  /// Order of index j (0-based) between `level` and the previous successful
  /// level; empty for the first.
  OrderEstimate eigenvalue_order(std::size_t level, int j) const;
  OrderEstimate eigenfunction_order(std::size_t level, int j) const;
  /// Lower-bound flag of index j at `level`: exact - approx >= 0 when the
  /// spectrum is known, otherwise increase over the previous level. Empty when
  /// not applicable.
  std::optional<bool> lower_bound_flag(std::size_t level, int j) const;
};

/// Runs every level; a failing level is recorded and the rest still run.
/// Progress lines go to `log` when given.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

void write_csv(std::ostream& os, const ExperimentResult& result);
void write_plot_data(std::ostream& os, const ExperimentResult& result);
void write_table(std::ostream& os, const ExperimentResult& result);

/// Writes csv, plot data and table into config.out_dir (created if missing).
void write_outputs(const ExperimentResult& result);

}  // namespace wgeig
