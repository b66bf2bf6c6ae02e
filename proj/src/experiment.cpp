#include "wgeig/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "wgeig/algorithms.hpp"

namespace wgeig {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

bool is_power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

int log2_exact(int x) {
  int r = 0;
  while (x > 1) {
    x >>= 1;
    ++r;
  }
  return r;
}

std::string fmt(double x, const char* f = "%.10e") {
  if (!std::isfinite(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string fraction(int n) { return "1/" + std::to_string(n); }

}  // namespace

std::string to_string(Domain d) {
  return d == Domain::unit_square ? "unit_square" : "l_shape";
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::direct: return "direct";
    case Algorithm::two_grid: return "two_grid";
    case Algorithm::two_space: return "two_space";
  }
  return "?";
}

Domain parse_domain(const std::string& s) {
  if (s == "unit_square") return Domain::unit_square;
  if (s == "l_shape") return Domain::l_shape;
  throw ConfigError("unknown domain '" + s + "' (expected unit_square or l_shape)");
}

Algorithm parse_algorithm(const std::string& s) {
  if (s == "direct") return Algorithm::direct;
  if (s == "two_grid" || s == "two-grid") return Algorithm::two_grid;
  if (s == "two_space" || s == "two-space") return Algorithm::two_space;
  throw ConfigError("unknown algorithm '" + s + "' (expected direct, two_grid or two_space)");
}

int parse_mesh_size(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw ConfigError("empty mesh size");
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    if (trim(s.substr(0, slash)) != "1")
      throw ConfigError("mesh size '" + s + "' must have the form 1/n");
    const int n = to_int("mesh size", trim(s.substr(slash + 1)));
    if (n < 1) throw ConfigError("mesh size '" + s + "' must have n >= 1");
    return n;
  }
  const double x = to_double("mesh size", s);
  if (x >= 2.0 && x == std::floor(x)) return static_cast<int>(x);
  if (!(x > 0.0 && x <= 1.0)) throw ConfigError("mesh size '" + s + "' out of range");
  const double inv = 1.0 / x;
  const double n = std::round(inv);
  if (std::abs(inv - n) > 1e-9 * n) throw ConfigError("mesh size '" + s + "' is not 1/n");
  return static_cast<int>(n);
}

std::vector<Level> parse_schedule(const std::string& s, Algorithm algorithm) {
  std::vector<Level> out;
  for (const std::string& entry : split(unquote(trim(s)), ';')) {
    if (entry.empty()) continue;
    const auto parts = split(entry, ',');
    Level l;
    if (parts.size() == 1) {
      if (algorithm == Algorithm::two_grid)
        throw ConfigError("two-grid schedule entry '" + entry + "' needs the form H,h");
      l.coarse = l.fine = parse_mesh_size(parts[0]);
    } else if (parts.size() == 2) {
      l.coarse = parse_mesh_size(parts[0]);
      l.fine = parse_mesh_size(parts[1]);
      if (algorithm != Algorithm::two_grid && l.coarse != l.fine)
        throw ConfigError("schedule entry '" + entry + "': " + to_string(algorithm) +
                          " uses a single mesh size per level");
    } else {
      throw ConfigError("malformed schedule entry '" + entry + "'");
    }
    out.push_back(l);
  }
  if (out.empty()) throw ConfigError("empty schedule");
  return out;
}

std::string format_schedule(const std::vector<Level>& schedule, Algorithm algorithm) {
  std::string out;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i) out += ";";
    if (algorithm == Algorithm::two_grid) out += fraction(schedule[i].coarse) + ",";
    out += fraction(schedule[i].fine);
  }
  return out;
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig c) {
  std::istringstream in(text);
  std::string line;
  std::string schedule_text;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = unquote(trim(line.substr(eq + 1)));
    if (key == "name") c.name = v;
    else if (key == "domain") c.domain = parse_domain(v);
    else if (key == "pattern") {
      try {
        c.pattern = parse_pattern(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "algorithm") c.algorithm = parse_algorithm(v);
    else if (key == "k") c.k = to_int(key, v);
    else if (key == "k1") c.k1 = to_int(key, v);
    else if (key == "k2") c.k2 = to_int(key, v);
    else if (key == "epsilon") c.epsilon = to_double(key, v);
    else if (key == "schedule") schedule_text = v;
    else if (key == "nev") c.nev = to_int(key, v);
    else if (key == "tol") c.tol = to_double(key, v);
    else if (key == "linear_tol") c.linear_tol = to_double(key, v);
    else if (key == "gamma") c.gamma = to_double(key, v);
    else if (key == "out_dir") c.out_dir = v;
    else if (key == "csv") c.csv = v;
    else if (key == "plot_data") c.plot_data = v;
    else if (key == "table") c.table = v;
    else if (key == "unlock_large") c.unlock_large = to_bool(key, v);
    else if (key == "threads") c.threads = to_int(key, v);
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  // Parsed last so that the algorithm key may appear anywhere in the file.
  if (!schedule_text.empty()) c.schedule = parse_schedule(schedule_text, c.algorithm);
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

int desk_scale_limit(int degree) { return degree <= 1 ? 256 : 64; }

void validate(const ExperimentConfig& c) {
  if (!(c.epsilon >= 0.0 && c.epsilon < 1.0))
    throw ConfigError("epsilon must lie in [0, 1), got " + std::to_string(c.epsilon));
  if (c.nev < 1) throw ConfigError("nev must be >= 1");
  if (!(c.tol > 0.0) || !(c.linear_tol > 0.0)) throw ConfigError("tolerances must be positive");
  if (c.threads < 1) throw ConfigError("threads must be >= 1");
  if (c.gamma && !(*c.gamma > 0.0)) throw ConfigError("gamma must be positive");
  int degree = c.k;
  if (c.algorithm == Algorithm::two_space) {
    if (c.k1 < 1 || c.k2 < c.k1) throw ConfigError("two-space needs 1 <= k1 <= k2");
    degree = c.k2;
  } else if (c.k < 1) {
    throw ConfigError("k must be >= 1");
  }
  if (c.schedule.empty()) throw ConfigError("empty schedule");
  const int limit = desk_scale_limit(degree);
  for (const Level& l : c.schedule) {
    const std::string label = "level (" + fraction(l.coarse) + ", " + fraction(l.fine) + ")";
    if (l.coarse < 1 || l.fine < 1) throw ConfigError(label + ": mesh sizes must be 1/n, n >= 1");
    if (c.algorithm == Algorithm::two_grid) {
      if (l.fine <= l.coarse || l.fine % l.coarse != 0 || !is_power_of_two(l.fine / l.coarse))
        throw ConfigError(label + ": h must equal H / 2^m with m >= 1 (red refinement)");
    } else if (l.coarse != l.fine) {
      throw ConfigError(label + ": " + to_string(c.algorithm) + " uses one mesh per level");
    }
    if (l.fine > limit && !c.unlock_large)
      throw ConfigError(label + ": h below the desk-scale limit " + fraction(limit) +
                        " for degree " + std::to_string(degree) + "; pass --unlock-large");
  }
}

namespace {

struct PresetEntry {
  const char* name;
  const char* description;
};

constexpr PresetEntry kPresets[] = {
    {"table1", "two-grid, unit square, k=1, eps=0, h=H^2"},
    {"table2", "two-grid, unit square, k=1, eps=0.1, h=H^2"},
    {"table3_4", "two-grid, unit square, k=2, eps=0.1, h=H^2"},
    {"table6_7", "two-grid, unit square, k=2, eps=0.1, h=H^(3/2)"},
    {"fig1_2", "two-space, unit square, k1=1, k2=2, eps=0.2, h=1/4..1/64"},
    {"fig3_4", "two-space, unit square, k1=2, k2=3, eps=0.2, h=1/4..1/64"},
    {"table8", "two-grid, L-shape, k=2, eps=0.1, h=H^(3/2)"},
};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& p : kPresets) out.emplace_back(p.name);
  return out;
}

std::string preset_description(const std::string& name) {
  for (const auto& p : kPresets)
    if (name == p.name) return p.description;
  throw ConfigError("unknown preset '" + name + "'");
}

ExperimentConfig preset(const std::string& name, bool unlock_large) {
  preset_description(name);  // validates the name
  ExperimentConfig c;
  c.name = name;
  c.unlock_large = unlock_large;
  c.out_dir = name;
  auto grid = [&](std::vector<Level> desk, std::vector<Level> large) {
    c.schedule = std::move(desk);
    if (unlock_large) c.schedule.insert(c.schedule.end(), large.begin(), large.end());
  };
  if (name == "table1" || name == "table2") {
    // The symmetric crisscross mesh keeps the six lowest modes in order on the
    // 4x4 coarse grid.
    c.algorithm = Algorithm::two_grid;
    c.pattern = DiagonalPattern::crisscross;
    c.k = 1;
    c.epsilon = name == "table1" ? 0.0 : 0.1;
    grid({{4, 16}, {8, 64}, {16, 256}}, {});
  } else if (name == "table3_4") {
    c.algorithm = Algorithm::two_grid;
    c.k = 2;
    c.epsilon = 0.1;
    grid({{4, 16}, {8, 64}}, {{16, 256}});
  } else if (name == "table6_7") {
    c.algorithm = Algorithm::two_grid;
    c.k = 2;
    c.epsilon = 0.1;
    grid({{4, 8}, {16, 64}}, {{64, 512}});
  } else if (name == "fig1_2" || name == "fig3_4") {
    c.algorithm = Algorithm::two_space;
    c.k1 = name == "fig1_2" ? 1 : 2;
    c.k2 = c.k1 + 1;
    c.epsilon = 0.2;
    grid({{4, 4}, {8, 8}, {16, 16}, {32, 32}, {64, 64}}, {});
  } else if (name == "table8") {
    c.domain = Domain::l_shape;
    c.algorithm = Algorithm::two_grid;
    c.k = 2;
    c.epsilon = 0.1;
    grid({{4, 8}, {16, 64}}, {{64, 512}});
  }
  return c;
}

bool ExperimentResult::any_failure() const {
  for (const auto& l : levels)
    if (!l.ok) return true;
  return false;
}

double ExperimentResult::order_size(std::size_t level) const {
  const Level& l = levels.at(level).level;
  return 1.0 / (config.algorithm == Algorithm::two_grid ? l.coarse : l.fine);
}

namespace {

// Index of the closest earlier successful level, or -1.
int previous_ok(const ExperimentResult& r, std::size_t level) {
  for (int i = static_cast<int>(level) - 1; i >= 0; --i)
    if (r.levels[i].ok) return i;
  return -1;
}

}  // namespace

OrderEstimate ExperimentResult::eigenvalue_order(std::size_t level, int j) const {
  const int p = previous_ok(*this, level);
  if (p < 0 || !levels[level].ok) return {};
  return observed_order(levels[p].eig_error[j], levels[level].eig_error[j], order_size(p),
                        order_size(level));
}

OrderEstimate ExperimentResult::eigenfunction_order(std::size_t level, int j) const {
  const int p = previous_ok(*this, level);
  if (p < 0 || !levels[level].ok) return {};
  return observed_order(levels[p].fun_error[j], levels[level].fun_error[j], order_size(p),
                        order_size(level));
}

std::optional<bool> ExperimentResult::lower_bound_flag(std::size_t level, int j) const {
  const LevelResult& l = levels.at(level);
  if (!l.ok) return std::nullopt;
  if (std::isfinite(l.eig_error[j])) return l.eig_error[j] >= 0.0;
  const int p = previous_ok(*this, level);
  if (p < 0) return std::nullopt;
  return l.lambda[j] > levels[p].lambda[j];
}

namespace {

using Clock = std::chrono::steady_clock;

std::shared_ptr<const Mesh> build_mesh(const ExperimentConfig& c, int n) {
  return std::make_shared<const Mesh>(c.domain == Domain::unit_square
                                          ? build_unit_square(n, c.pattern)
                                          : build_l_shape(n, c.pattern));
}

// Errors against the exact spectrum; leaves NaN when it is unknown.
void fill_errors(LevelResult& out, const ExactSpectrum& exact, const AssembledForms& forms,
                 const std::vector<const WeakFunction*>& functions) {
  const int nev = static_cast<int>(out.lambda.size());
  out.exact.assign(nev, kNaN);
  out.eig_error.assign(nev, kNaN);
  out.fun_error.assign(nev, kNaN);
  if (!exact.known()) return;
  std::map<const ExactCluster*, std::vector<Eigen::VectorXd>> projected;
  for (int j = 0; j < nev; ++j) {
    const ExactCluster& cluster = exact.cluster_of(j + 1);
    auto it = projected.find(&cluster);
    if (it == projected.end()) {
      std::vector<Eigen::VectorXd> p;
      for (const auto& f : cluster.functions) p.push_back(project_Qh(f, forms.space).coefficients());
      it = projected.emplace(&cluster, std::move(p)).first;
    }
    out.exact[j] = cluster.eigenvalue;
    out.eig_error[j] = cluster.eigenvalue - out.lambda[j];
    out.fun_error[j] = eigenfunction_error(forms.A, functions[j]->coefficients(), it->second);
  }
}

LevelResult run_level(const ExperimentConfig& c, const Level& level, const ExactSpectrum& exact) {
  AlgorithmOptions opts;
  opts.eigen.tol = c.tol;
  opts.linear_tol = c.linear_tol;
  opts.assembly.threads = c.threads;

  LevelResult out;
  out.level = level;
  std::vector<const WeakFunction*> functions;
  if (c.algorithm == Algorithm::direct) {
    const DirectResult r = direct_wg(build_mesh(c, level.fine), c.k, c.epsilon, c.nev, opts);
    out.lambda = r.eig.eigenvalues;
    for (const auto& u : r.eig.eigenvectors) functions.push_back(&u);
    out.wall_fine = r.seconds;
    fill_errors(out, exact, r.forms, functions);
    return out;
  }
  const AcceleratedRun run =
      c.algorithm == Algorithm::two_grid
          ? two_grid_all(build_mesh(c, level.coarse), log2_exact(level.fine / level.coarse), c.k,
                         c.epsilon, c.nev, opts)
          : two_space_all(build_mesh(c, level.fine), c.k1, c.k2, c.epsilon, c.nev, opts);
  out.wall_coarse = run.shared.coarse_solve;
  out.wall_fine = run.shared.fine_solve + run.shared.transfer;
  for (const auto& r : run.results) {
    out.lambda.push_back(r.eigenvalue);
    functions.push_back(&r.corrected);
    out.wall_fine += r.timing.transfer + r.timing.fine_solve + r.timing.quotient;
  }
  fill_errors(out, exact, run.fine_forms, functions);
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  validate(config);
  ExperimentResult result;
  result.config = config;
  const bool convex = config.domain == Domain::unit_square;
  result.model = config.algorithm == Algorithm::two_space
                     ? OrderModel::make(config.k1, config.epsilon, convex, config.k2, config.gamma)
                     : OrderModel::make(config.k, config.epsilon, convex, 0, config.gamma);
  const ExactSpectrum exact =
      convex ? ExactSpectrum::unit_square(config.nev) : ExactSpectrum::unknown();

  for (const Level& level : config.schedule) {
    const auto start = Clock::now();
    LevelResult lr;
    try {
      lr = run_level(config, level, exact);
    } catch (const std::exception& e) {
      lr = LevelResult{};
      lr.level = level;
      lr.ok = false;
      lr.error = e.what();
    }
    if (log) {
      *log << "[" << config.name << "] H=" << fraction(level.coarse)
           << " h=" << fraction(level.fine) << ": "
           << (lr.ok ? "ok" : "FAILED: " + lr.error) << " ("
           << fmt(std::chrono::duration<double>(Clock::now() - start).count(), "%.2f")
           << " s)\n";
    }
    result.levels.push_back(std::move(lr));
  }
  return result;
}

void write_csv(std::ostream& os, const ExperimentResult& r) {
  os << "level,H,h,index,lambda_approx,lambda_exact,eig_error,eigfun_error_triplebar,"
        "order_lambda,order_fun,lower_bound_flag,wall_time_coarse,wall_time_fine\n";
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const LevelResult& lr = r.levels[l];
    if (!lr.ok) continue;
    for (int j = 0; j < static_cast<int>(lr.lambda.size()); ++j) {
      const OrderEstimate ol = r.eigenvalue_order(l, j);
      const OrderEstimate of = r.eigenfunction_order(l, j);
      const auto flag = r.lower_bound_flag(l, j);
      os << l + 1 << ',' << fmt(1.0 / lr.level.coarse, "%.17g") << ','
         << fmt(1.0 / lr.level.fine, "%.17g") << ',' << j + 1 << ',' << fmt(lr.lambda[j], "%.17g")
         << ',' << fmt(lr.exact[j], "%.17g") << ',' << fmt(lr.eig_error[j]) << ','
         << fmt(lr.fun_error[j]) << ',' << (ol.value ? fmt(*ol.value, "%.6f") : "") << ','
         << (of.value ? fmt(*of.value, "%.6f") : "") << ','
         << (flag ? (*flag ? "1" : "0") : "") << ',' << fmt(lr.wall_coarse, "%.6f") << ','
         << fmt(lr.wall_fine, "%.6f") << '\n';
    }
  }
}

void write_plot_data(std::ostream& os, const ExperimentResult& r) {
  os << "# " << r.config.name << " (" << to_string(r.config.algorithm) << ", "
     << to_string(r.config.domain) << ")\n";
  os << "# one block per index; columns: H h lambda_approx |eig_error| eigfun_error\n";
  const int nev = r.config.nev;
  for (int j = 0; j < nev; ++j) {
    os << "# index " << j + 1 << "\n";
    for (const LevelResult& lr : r.levels) {
      if (!lr.ok) continue;
      os << fmt(1.0 / lr.level.coarse, "%.10e") << ' ' << fmt(1.0 / lr.level.fine, "%.10e") << ' '
         << fmt(lr.lambda[j], "%.15e") << ' '
         << (std::isfinite(lr.eig_error[j]) ? fmt(std::abs(lr.eig_error[j])) : "nan") << ' '
         << (std::isfinite(lr.fun_error[j]) ? fmt(lr.fun_error[j]) : "nan") << '\n';
    }
    os << "\n\n";
  }
}

void write_table(std::ostream& os, const ExperimentResult& r) {
  const ExperimentConfig& c = r.config;
  os << c.name << ": " << to_string(c.algorithm) << " on " << to_string(c.domain) << " ("
     << to_string(c.pattern) << "), ";
  if (c.algorithm == Algorithm::two_space)
    os << "k1=" << c.k1 << ", k2=" << c.k2;
  else
    os << "k=" << c.k;
  os << ", epsilon=" << c.epsilon << "\n";
  os << "predicted orders: k_bar=" << fmt(r.model.k_bar(), "%.4f")
     << ", k_hat=" << fmt(r.model.k_hat(), "%.4f") << ", gamma=" << fmt(r.model.gamma, "%.4f")
     << "\n\n";

  auto cell = [](const std::string& s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%16s", s.c_str());
    return std::string(buf);
  };
  os << cell("H");
  for (const auto& lr : r.levels) os << cell(fraction(lr.level.coarse));
  os << "\n" << cell("h");
  for (const auto& lr : r.levels) os << cell(fraction(lr.level.fine));
  os << "\n";

  const bool known = c.domain == Domain::unit_square;
  for (int j = 0; j < c.nev; ++j) {
    if (known) {
      os << cell("lam" + std::to_string(j + 1) + " err");
      for (const auto& lr : r.levels) os << cell(lr.ok ? fmt(lr.eig_error[j], "%.4e") : "failed");
      os << "\n" << cell("order");
      for (std::size_t l = 0; l < r.levels.size(); ++l) {
        const auto o = r.eigenvalue_order(l, j);
        os << cell(o.value ? fmt(*o.value, "%.4f") + (o.sign_flip ? "*" : "") : "--");
      }
      os << "\n";
    } else {
      os << cell("lam" + std::to_string(j + 1));
      for (const auto& lr : r.levels) os << cell(lr.ok ? fmt(lr.lambda[j], "%.10f") : "failed");
      std::vector<std::vector<double>> values;
      for (const auto& lr : r.levels)
        if (lr.ok) values.push_back({lr.lambda[j]});
      const bool up = values.size() > 1 && monotone_increase_report(values)[0];
      os << "  " << (values.size() > 1 ? (up ? "increasing" : "not increasing") : "") << "\n";
    }
  }
  if (known) {
    os << "\n";
    for (int j = 0; j < c.nev; ++j) {
      os << cell("u" + std::to_string(j + 1) + " err");
      for (const auto& lr : r.levels) os << cell(lr.ok ? fmt(lr.fun_error[j], "%.4e") : "failed");
      os << "\n" << cell("order");
      for (std::size_t l = 0; l < r.levels.size(); ++l) {
        const auto o = r.eigenfunction_order(l, j);
        os << cell(o.value ? fmt(*o.value, "%.4f") : "--");
      }
      os << "\n";
    }
  }
  if (known) os << "\n* errors change sign between levels; order from |e|\n";
  os << "\n" << cell("time coarse");
  for (const auto& lr : r.levels) os << cell(fmt(lr.wall_coarse, "%.3f"));
  os << "\n" << cell("time fine");
  for (const auto& lr : r.levels) os << cell(fmt(lr.wall_fine, "%.3f"));
  os << "\n";
  for (const auto& lr : r.levels)
    if (!lr.ok)
      os << "level (" << fraction(lr.level.coarse) << ", " << fraction(lr.level.fine)
         << ") failed: " << lr.error << "\n";
}

void write_outputs(const ExperimentResult& result) {
  const std::filesystem::path dir(result.config.out_dir);
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  if (!result.config.csv.empty()) {
    auto f = open(result.config.csv);
    write_csv(f, result);
  }
  if (!result.config.plot_data.empty()) {
    auto f = open(result.config.plot_data);
    write_plot_data(f, result);
  }
  if (!result.config.table.empty()) {
    auto f = open(result.config.table);
    write_table(f, result);
  }
}

}  // namespace wgeig
