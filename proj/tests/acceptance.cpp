// Acceptance checks. Prints one PASS/FAIL line per criterion.
// Usage: acceptance [N ...]   (criteria numbers; all when none given)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wgeig/algorithms.hpp"
#include "wgeig/analysis.hpp"
#include "wgeig/experiment.hpp"
#include "wgeig/quadrature.hpp"

using namespace wgeig;

namespace {

// Ranges written as "about a-b" are read at their printed precision.
constexpr double kRoundingSlack = 0.05;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::ostringstream failures;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures << " [" << what << "]";
    }
  }
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4e", v);
  return buf;
}

std::shared_ptr<const Mesh> square(int n, DiagonalPattern p = DiagonalPattern::right_up) {
  return std::make_shared<const Mesh>(build_unit_square(n, p));
}

double seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Integral over element t by a high-order rule.
template <class F>
double integrate(const Mesh& m, int t, F&& f, int degree = 20) {
  const QuadratureRule& rule = cached_triangle_rule(degree);
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q)
    s += rule.weights[q] * 2.0 * m.area(t) * f(map_to_triangle(m, t, rule.points[q]));
  return s;
}

bool all_levels_ok(const ExperimentResult& r, Outcome& o) {
  for (const LevelResult& l : r.levels) o.require(l.ok, "level failed: " + l.error);
  return !r.any_failure();
}

// 1. Direct scheme: lower bounds and order 2k - 2 eps for k = 1, eps = 0.
void criterion1(Outcome& o) {
  ExperimentConfig c;
  c.algorithm = Algorithm::direct;
  c.pattern = DiagonalPattern::crisscross;
  c.k = 1;
  c.epsilon = 0.0;
  c.schedule = {{8, 8}, {16, 16}, {32, 32}};
  c.nev = 6;
  const auto start = Clock::now();
  const ExperimentResult r = run_experiment(c);
  const double t = seconds(start);
  if (!all_levels_ok(r, o)) return;
  double lo = 1e9, hi = -1e9;
  for (std::size_t l = 0; l < r.levels.size(); ++l)
    for (int j = 0; j < c.nev; ++j) {
      o.require(r.levels[l].eig_error[j] >= 0.0, "lambda_" + std::to_string(j + 1) + " not a lower bound");
      if (l == 0) continue;
      const OrderEstimate e = r.eigenvalue_order(l, j);
      o.require(e.value.has_value(), "order missing");
      if (!e.value) continue;
      lo = std::min(lo, *e.value);
      hi = std::max(hi, *e.value);
      o.require(*e.value >= 1.7 && *e.value <= 2.3, "order " + fixed(*e.value) + " outside [1.7, 2.3]");
    }
  o.require(t < 30.0, "runtime " + fixed(t, 1) + " s");
  o.detail << "direct k=1 eps=0 h=1/8..1/32 (crisscross): all lower bounds, orders " << fixed(lo)
           << ".." << fixed(hi) << ", " << fixed(t, 1) << " s";
}

// 2. Two-grid k = 1, eps = 0, h = H^2 against reference errors and orders.
void criterion2(Outcome& o) {
  const double ref_err[6][3] = {{2.1554e-1, 1.3006e-2, 8.0627e-4}, {1.3687e+0, 8.2219e-2, 4.8684e-3},
                                {1.3687e+0, 7.8229e-2, 4.8240e-3}, {3.1148e+0, 2.0798e-1, 1.2318e-2},
                                {4.3750e+0, 3.0337e-1, 1.8860e-2}, {4.0896e+0, 3.0980e-1, 1.8206e-2}};
  const double ref_order[6][2] = {{4.0507, 4.0118}, {4.0572, 4.0780}, {4.1290, 4.0194},
                                  {3.9046, 4.0776}, {3.8501, 4.0077}, {3.7225, 4.0889}};
  const ExperimentConfig c = preset("table1");
  const auto start = Clock::now();
  const ExperimentResult r = run_experiment(c);
  const double t = seconds(start);
  if (!all_levels_ok(r, o)) return;
  o.require(r.levels.size() == 3, "expected three levels");
  double worst_ratio = 1.0, worst_order = 0.0;
  for (int j = 0; j < 6; ++j) {
    for (int l = 0; l < 3; ++l) {
      const double e = r.levels[l].eig_error[j];
      o.require(e > 0.0, "lambda_" + std::to_string(j + 1) + " error not positive");
      const double ratio = std::max(e / ref_err[j][l], ref_err[j][l] / e);
      worst_ratio = std::max(worst_ratio, ratio);
      o.require(ratio <= 2.5, "magnitude ratio " + fixed(ratio, 2));
      if (l == 0) continue;
      const OrderEstimate est = r.eigenvalue_order(l, j);
      o.require(est.value.has_value(), "order missing");
      if (!est.value) continue;
      const double d = std::abs(*est.value - ref_order[j][l - 1]);
      worst_order = std::max(worst_order, d);
      o.require(d <= 0.35, "order " + fixed(*est.value) + " vs " + fixed(ref_order[j][l - 1]));
    }
  }
  o.require(t < 300.0, "runtime " + fixed(t, 1) + " s");
  o.detail << "preset table1: all errors positive, max magnitude ratio " << fixed(worst_ratio, 2)
           << ", max order deviation " << fixed(worst_order, 3) << ", " << fixed(t, 1) << " s";
}

// 3. Two-grid k = 1, eps = 0.1: orders within 0.35 of 3.86-3.91.
void criterion3(Outcome& o) {
  const ExperimentConfig c = preset("table2");
  const ExperimentResult r = run_experiment(c);
  if (!all_levels_ok(r, o)) return;
  double lo = 1e9, hi = -1e9;
  for (std::size_t l = 1; l < r.levels.size(); ++l)
    for (int j = 0; j < c.nev; ++j) {
      const OrderEstimate e = r.eigenvalue_order(l, j);
      o.require(e.value.has_value(), "order missing");
      if (!e.value) continue;
      lo = std::min(lo, *e.value);
      hi = std::max(hi, *e.value);
      o.require(*e.value >= 3.86 - 0.35 && *e.value <= 3.91 + 0.35, "order " + fixed(*e.value));
    }
  o.detail << "preset table2: orders " << fixed(lo) << ".." << fixed(hi) << " within [3.51, 4.26]";
}

// 4. Two-grid k = 2, eps = 0.1, h = H^2 on (1/4,1/16), (1/8,1/64).
void criterion4(Outcome& o) {
  // Sign of lambda_j - approx at both levels.
  const int ref_sign[6] = {1, -1, -1, -1, -1, -1};
  const ExperimentConfig c = preset("table3_4");
  const auto start = Clock::now();
  const ExperimentResult r = run_experiment(c);
  const double t = seconds(start);
  if (!all_levels_ok(r, o)) return;
  o.require(r.levels.size() >= 2, "expected two levels");
  double elo = 1e9, ehi = -1e9, flo = 1e9, fhi = -1e9;
  for (int j = 0; j < 6; ++j) {
    for (int l = 0; l < 2; ++l) {
      const double e = r.levels[l].eig_error[j];
      o.require((e > 0.0 ? 1 : -1) == ref_sign[j], "sign of lambda_" + std::to_string(j + 1));
    }
    const OrderEstimate ev = r.eigenvalue_order(1, j);
    const OrderEstimate fv = r.eigenfunction_order(1, j);
    o.require(ev.value && fv.value, "order missing");
    if (!ev.value || !fv.value) continue;
    elo = std::min(elo, *ev.value);
    ehi = std::max(ehi, *ev.value);
    flo = std::min(flo, *fv.value);
    fhi = std::max(fhi, *fv.value);
    o.require(*ev.value >= 7.5 - kRoundingSlack && *ev.value <= 8.5 + kRoundingSlack,
              "eigenvalue order " + fixed(*ev.value));
    o.require(*fv.value >= 3.9 - kRoundingSlack && *fv.value <= 4.2 + kRoundingSlack,
              "eigenfunction order " + fixed(*fv.value));
  }
  o.require(t < 600.0, "runtime " + fixed(t, 1) + " s");
  o.detail << "preset table3_4: eigenvalue orders " << fixed(elo) << ".." << fixed(ehi)
           << ", eigenfunction orders " << fixed(flo) << ".." << fixed(fhi)
           << ", signs +,-,-,-,-,-, " << fixed(t, 1) << " s";
}

// 5. Two-grid k = 2, eps = 0.1, h = H^{3/2} on (1/4,1/8), (1/16,1/64).
void criterion5(Outcome& o) {
  const ExperimentConfig c = preset("table6_7");
  const ExperimentResult r = run_experiment(c);
  if (!all_levels_ok(r, o)) return;
  std::ostringstream ev_list, fv_list;
  for (int j = 0; j < 6; ++j) {
    const OrderEstimate ev = r.eigenvalue_order(1, j);
    o.require(ev.value.has_value(), "order missing");
    if (!ev.value) continue;
    const double eo = *ev.value;
    ev_list << (j ? " " : "") << fixed(eo, 2) << (ev.sign_flip ? "*" : "");
    o.require(eo >= 5.3 - kRoundingSlack && eo <= 6.0 + kRoundingSlack,
              "eigenvalue order j=" + std::to_string(j + 1) + " " + fixed(eo));
    const OrderEstimate fo = r.eigenfunction_order(1, j);
    o.require(fo.value.has_value(), "order missing");
    if (!fo.value) continue;
    fv_list << (j ? " " : "") << fixed(*fo.value, 2);
    o.require(*fo.value >= 2.9 - kRoundingSlack && *fo.value <= 3.5 + kRoundingSlack,
              "eigenfunction order j=" + std::to_string(j + 1) + " " + fixed(*fo.value));
  }
  o.detail << "preset table6_7: eigenvalue orders " << ev_list.str()
           << " (* sign change, order from |e|), eigenfunction orders " << fv_list.str();
}

// 6. Two-space k1 = 1, k2 = 2, eps = 0.2: slope >= 3.0 and lower bounds.
void criterion6(Outcome& o) {
  ExperimentConfig c = preset("fig1_2");
  c.schedule = {{8, 8}, {16, 16}, {32, 32}, {64, 64}};
  const ExperimentResult r = run_experiment(c);
  if (!all_levels_ok(r, o)) return;
  // Least-squares slope of log|e| against log h.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(r.levels.size());
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const double e = r.levels[l].eig_error[0];
    for (int j = 0; j < c.nev; ++j)
      o.require(r.levels[l].eig_error[j] >= 0.0,
                "lambda_" + std::to_string(j + 1) + " not a lower bound at level " + std::to_string(l + 1));
    const double x = std::log(r.order_size(l)), y = std::log(std::abs(e));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  o.require(slope >= 3.0, "slope " + fixed(slope));
  o.detail << "two-space k1=1 k2=2 eps=0.2 h=1/8..1/64: slope " << fixed(slope)
           << " (predicted " << fixed(r.model.two_space_eigenvalue(), 1) << "), all lower bounds";
}

// 7. L-shape two-grid: monotone increase and first eigenvalue reference.
void criterion7(Outcome& o) {
  const double reference = 9.6383056544;
  const ExperimentConfig c = preset("table8");
  const auto start = Clock::now();
  const ExperimentResult r = run_experiment(c);
  const double t = seconds(start);
  if (!all_levels_ok(r, o)) return;
  std::vector<std::vector<double>> levels;
  for (const LevelResult& l : r.levels) levels.push_back(l.lambda);
  const auto up = monotone_increase_report(levels);
  for (std::size_t j = 0; j < up.size(); ++j)
    o.require(up[j], "lambda_" + std::to_string(j + 1) + " not increasing");
  const double l1 = r.levels[1].lambda[0];
  const double rel = std::abs(l1 - reference) / reference;
  o.require(rel <= 1e-2, "lambda_1 relative deviation " + sci(rel));
  o.require(t < 300.0, "runtime " + fixed(t, 1) + " s");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", l1);
  o.detail << "preset table8: all six increasing, lambda_1(1/16,1/64) = " << buf << " (rel. dev. "
           << sci(rel) << "), " << fixed(t, 1) << " s";
}

// 8. Condensed solver against the dense pencil; fixed-point property.
void criterion8(Outcome& o) {
  struct Case {
    std::shared_ptr<const Mesh> mesh;
    int k;
    double eps;
  };
  std::vector<Case> cases;
  for (auto p : {DiagonalPattern::right_up, DiagonalPattern::right_down, DiagonalPattern::crisscross})
    for (int n : {1, 2, 4, 8})
      for (int k : {1, 2, 3}) cases.push_back({square(n, p), k, 0.1 * k});
  for (int n : {1, 2}) cases.push_back({std::make_shared<const Mesh>(build_l_shape(n)), 2, 0.1});
  int checked = 0;
  double worst = 0.0;
  for (const Case& c : cases) {
    auto space = std::make_shared<const WgSpace>(c.mesh, c.k);
    if (space->num_dofs() > 2000) continue;
    const AssembledForms f = assemble_forms(space, c.eps);
    const int nev = std::min(6, space->num_interior_dofs());
    const EigenResult b = eigensolve(f, nev, {.mode = EigenMode::dense_oracle});
    // Subspace iteration forced on, then the default small-problem path.
    for (int limit : {0, EigenOptions{}.dense_limit}) {
      const EigenResult a = eigensolve(f, nev, {.dense_limit = limit});
      for (int j = 0; j < nev; ++j) {
        const double rel = std::abs(a.eigenvalues[j] - b.eigenvalues[j]) / b.eigenvalues[j];
        worst = std::max(worst, rel);
        o.require(rel <= 1e-8, "oracle mismatch " + sci(rel));
      }
    }
    ++checked;
  }

  // Correction on the space that produced the eigenpair returns it unchanged.
  double fp = 0.0;
  for (int k : {1, 2}) {
    const DirectResult d =
        direct_wg(square(4, DiagonalPattern::crisscross), k, 0.1, 4, {.eigen = {.tol = 1e-12}});
    const auto solver = make_system_solver(d.forms);
    for (int j = 0; j < 4; ++j) {
      const Correction c =
          correct_eigenfunction(d.forms, *solver, d.eig.eigenvalues[j], d.eig.eigenvectors[j], 1e-12);
      const double dl = std::abs(c.rayleigh - d.eig.eigenvalues[j]) / d.eig.eigenvalues[j];
      const Eigen::VectorXd du = c.function.coefficients() - d.eig.eigenvectors[j].coefficients();
      const double dv = std::sqrt(du.dot(d.forms.B * du));
      fp = std::max({fp, dl, dv});
      o.require(dl <= 1e-10 && dv <= 1e-10, "fixed point off by " + sci(std::max(dl, dv)));
    }
    const AcceleratedRun same = two_space_all(d.space->mesh_ptr(), k, k, 0.1, 4, {.eigen = {.tol = 1e-12}});
    for (int j = 0; j < 4; ++j) {
      const double dl = std::abs(same.results[j].eigenvalue - d.eig.eigenvalues[j]) / d.eig.eigenvalues[j];
      fp = std::max(fp, dl);
      o.require(dl <= 1e-10, "two-space k1=k2 off by " + sci(dl));
    }
  }
  o.detail << checked << " meshes <= 2000 DOFs, max relative oracle deviation " << sci(worst)
           << "; fixed-point deviation " << sci(fp);
}

// 9. Property suites.
void criterion9(Outcome& o) {
  // Symmetry and definiteness.
  for (int k : {1, 2, 3}) {
    auto space = std::make_shared<const WgSpace>(square(3, DiagonalPattern::crisscross), k);
    const AssembledForms f = assemble_forms(space, 0.2);
    const Eigen::MatrixXd A(f.A), S(f.S), B(f.B);
    o.require((A - A.transpose()).norm() <= 1e-14 * A.norm(), "A not symmetric");
    o.require(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().minCoeff() > 0.0, "A not SPD");
    const Eigen::VectorXd se = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(S).eigenvalues();
    o.require(se.minCoeff() >= -1e-12 * se.maxCoeff(), "S not PSD");
    const Eigen::VectorXd be = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(B).eigenvalues();
    o.require(be.minCoeff() >= -1e-12, "B not PSD");
  }

  // Projection idempotence and orthogonality of the residual.
  double proj = 0.0;
  {
    auto mesh = square(4, DiagonalPattern::right_down);
    for (int k : {1, 2, 3}) {
      auto space = std::make_shared<const WgSpace>(mesh, k);
      const int nk = space->interior_dofs_per_element();
      const ScalarFunction f = [](const Point& x) { return std::exp(x.x()) * std::cos(2 * x.y()); };
      const Eigen::VectorXd c1 = project_Q0(f, *space);
      Eigen::VectorXd full = Eigen::VectorXd::Zero(space->num_dofs());
      full.head(space->num_interior_dofs()) = c1;
      const WeakFunction once(space, full);
      const Eigen::VectorXd c2 = project_Q0(
          [&](const Point& x) {
            for (int t = 0; t < mesh->num_triangles(); ++t) {
              const Point a = mesh->vertex(t, 0);
              Eigen::Matrix2d m;
              m.col(0) = mesh->vertex(t, 1) - a;
              m.col(1) = mesh->vertex(t, 2) - a;
              const Eigen::Vector2d l = m.inverse() * (x - a);
              if (l.minCoeff() > -1e-12 && l.sum() < 1 + 1e-12) return once.interior_value(t, x);
            }
            return 0.0;
          },
          *space);
      proj = std::max(proj, (c1 - c2).norm() / c1.norm());
      for (int t = 0; t < mesh->num_triangles(); ++t) {
        const Eigen::VectorXd ct = c1.segment(space->interior_offset(t), nk);
        for (int i = 0; i < nk; ++i) {
          const double ip = integrate(*mesh, t, [&](const Point& x) {
            const Eigen::VectorXd phi = space->basis(t).values(x);
            return (f(x) - phi.dot(ct)) * phi[i];
          });
          proj = std::max(proj, std::abs(ip));
        }
      }
    }
    o.require(proj <= 1e-12, "projection off by " + sci(proj));
  }

  // Commuting identity on single elements.
  double commute = 0.0;
  {
    const int k = 3;
    auto mesh = square(2, DiagonalPattern::crisscross);
    const WgSpace space(mesh, k);
    const ScalarFunction u = [](const Point& x) { return std::sin(x.x() + 2 * x.y()) * x.x(); };
    const VectorFunction gu = [](const Point& x) {
      const double c = std::cos(x.x() + 2 * x.y());
      return Eigen::Vector2d(std::sin(x.x() + 2 * x.y()) + x.x() * c, 2 * x.x() * c);
    };
    const Eigen::VectorXd q0 = project_Q0(u, space);
    const int nk = space.interior_dofs_per_element();
    for (int t = 0; t < mesh->num_triangles(); ++t) {
      Eigen::VectorXd local(space.num_local_dofs());
      local.head(nk) = q0.segment(space.interior_offset(t), nk);
      for (int le = 0; le < 3; ++le)
        local.segment(nk + le * k, k) = project_Qb_edge(u, *mesh, mesh->triangle_edges(t)[le], k);
      commute = std::max(commute,
                         (local_weak_gradient(space, t).matrix * local - project_Qbold(gu, space, t)).norm());
    }
    o.require(commute <= 1e-11, "commuting identity off by " + sci(commute));
  }

  // Interpolant constants do not grow across three refinements.
  std::vector<InterpolantConstants> cs;
  for (int n : {8, 16, 32})
    cs.push_back(sample_interpolant_constants(std::make_shared<const WgSpace>(square(n), 1), 20, 7));
  double growth = 0.0;
  for (std::size_t i = 1; i < cs.size(); ++i) {
    growth = std::max({growth, cs[i].stability / cs[i - 1].stability,
                       cs[i].approximation / cs[i - 1].approximation});
  }
  o.require(growth <= 1.10, "interpolant constant growth " + fixed(growth, 3));

  // Eigenfunction error invariant under rotation of the exact basis.
  double rot = 0.0;
  {
    auto space = std::make_shared<const WgSpace>(square(8), 2);
    const AssembledForms f = assemble_forms(space, 0.1);
    const EigenResult eig = eigensolve(f, 6);
    const ExactSpectrum s = ExactSpectrum::unit_square(6);
    for (int j : {2, 3, 5, 6}) {
      const ExactCluster& c = s.cluster_of(j);
      for (double th : {0.3, 1.1, 2.5}) {
        ExactCluster r;
        r.eigenvalue = c.eigenvalue;
        r.functions.push_back([&, th](const Point& x) {
          return std::cos(th) * c.functions[0](x) + std::sin(th) * c.functions[1](x);
        });
        r.functions.push_back([&, th](const Point& x) {
          return -std::sin(th) * c.functions[0](x) + std::cos(th) * c.functions[1](x);
        });
        const double e0 = eigenfunction_error(f, eig.eigenvectors[j - 1], c);
        const double e1 = eigenfunction_error(f, eig.eigenvectors[j - 1], r);
        rot = std::max(rot, std::abs(e1 - e0) / e0);
      }
    }
    o.require(rot <= 1e-10, "rotation invariance off by " + sci(rot));
  }
  o.detail << "symmetry/definiteness, projection (" << sci(proj) << "), commuting identity (" << sci(commute)
           << "), interpolant growth " << fixed(growth, 3) << ", rotation invariance (" << sci(rot) << ")";
}

// 10. Two-grid faster than the direct fine solve.
void criterion10(Outcome& o) {
  auto best_of = [](int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
      const auto start = Clock::now();
      fn();
      best = std::min(best, seconds(start));
    }
    return best;
  };
  // Warm-up fills the quadrature and basis caches for both runs.
  two_grid_all(square(4), 2, 2, 0.1, 6);
  direct_wg(square(16), 2, 0.1, 6);
  const double tg = best_of(3, [] { two_grid_all(square(4), 2, 2, 0.1, 6); });
  const double dw = best_of(3, [] { direct_wg(square(16), 2, 0.1, 6); });
  o.require(tg < 0.7 * dw, "ratio " + fixed(tg / dw, 3));
  o.detail << "two-grid (1/4,1/16) " << fixed(tg, 3) << " s vs direct 1/16 " << fixed(dw, 3)
           << " s, ratio " << fixed(tg / dw, 3) << " (limit 0.7)";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<void(Outcome&)>> criteria = {
      criterion1, criterion2, criterion3, criterion4, criterion5,
      criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [1-10 ...]\n";
      return 1;
    }
    selected.push_back(n);
  }
  if (selected.empty())
    for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) selected.push_back(n);

  int failed = 0;
  for (int n : selected) {
    Outcome o;
    try {
      criteria[n - 1](o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << ": " << o.detail.str()
              << o.failures.str() << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
