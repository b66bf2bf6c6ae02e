#include "wgeig/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wgeig {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Solves A w = rhs, normalises w and takes its Rayleigh quotient.
Correction solve_correction(const AssembledForms& target, const SpdSystemSolver& solver,
                            const Eigen::VectorXd& rhs, double linear_tol) {
  auto start = Clock::now();
  Eigen::VectorXd w = checked_solve(solver, target.A, rhs, linear_tol);
  const double solve = seconds_since(start);

  start = Clock::now();
  const double q = rayleigh_quotient(target.A, target.B, w);
  const double quotient = seconds_since(start);

  w /= std::sqrt(w.dot(target.B * w));
  return Correction{WeakFunction(target.space, std::move(w)), q, 0.0, solve, quotient};
}

struct CoarseSolve {
  std::shared_ptr<const WgSpace> space;
  EigenResult eig;
};

CoarseSolve coarse_eigensolve(std::shared_ptr<const Mesh> mesh, int k, double epsilon, int nev,
                              const AlgorithmOptions& options) {
  auto space = std::make_shared<const WgSpace>(std::move(mesh), k);
  const AssembledForms forms = assemble_forms(space, epsilon, options.assembly);
  const int want = std::min(nev + std::max(0, options.cluster_slack), space->num_interior_dofs());
  EigenResult eig = eigensolve(forms, want, options.eigen);
  return {space, std::move(eig)};
}

AcceleratedRun correct_all(CoarseSolve coarse, std::shared_ptr<const WgSpace> fine_space,
                           double epsilon, int nev, const AlgorithmOptions& options,
                           double coarse_seconds) {
  AcceleratedRun run;
  run.shared.coarse_solve = coarse_seconds;
  run.coarse_space = coarse.space;
  run.fine_space = fine_space;

  const auto start = Clock::now();
  run.fine_forms = assemble_forms(fine_space, epsilon, options.assembly);
  const auto solver = make_system_solver(run.fine_forms);
  run.shared.fine_solve = seconds_since(start);

  const auto transfer_start = Clock::now();
  const SparseMatrix transfer = assemble_transfer(*coarse.space, *fine_space);
  run.shared.transfer = seconds_since(transfer_start);

  for (int j = 0; j < nev; ++j) {
    const WeakFunction& u = coarse.eig.eigenvectors[j];
    const double lambda = coarse.eig.eigenvalues[j];
    const auto rhs_start = Clock::now();
    const Eigen::VectorXd rhs = lambda * (transfer * u.coefficients());
    Correction c = solve_correction(run.fine_forms, *solver, rhs, options.linear_tol);
    c.transfer_seconds = seconds_since(rhs_start) - c.solve_seconds - c.quotient_seconds;
    AcceleratedResult r{.index = j + 1,
                        .coarse_eigenvalue = lambda,
                        .coarse_eigenfunction = u,
                        .corrected = std::move(c.function),
                        .eigenvalue = c.rayleigh,
                        .timing = {}};
    r.timing.transfer = c.transfer_seconds;
    r.timing.fine_solve = c.solve_seconds;
    r.timing.quotient = c.quotient_seconds;
    run.results.push_back(std::move(r));
  }
  coarse.eig.eigenvalues.resize(nev);
  coarse.eig.eigenvectors.erase(coarse.eig.eigenvectors.begin() + nev,
                                coarse.eig.eigenvectors.end());
  coarse.eig.residuals.resize(nev);
  coarse.eig.cluster.resize(nev);
  run.coarse = std::move(coarse.eig);
  return run;
}

void check_index(int index) {
  if (index < 1) throw std::invalid_argument("eigenvalue index must be >= 1");
}

}  // namespace

DirectResult direct_wg(std::shared_ptr<const Mesh> mesh, int k, double epsilon, int nev,
                       const AlgorithmOptions& options) {
  const auto start = Clock::now();
  DirectResult out;
  out.space = std::make_shared<const WgSpace>(std::move(mesh), k);
  out.forms = assemble_forms(out.space, epsilon, options.assembly);
  out.eig = eigensolve(out.forms, nev, options.eigen);
  out.seconds = seconds_since(start);
  return out;
}

double rayleigh_quotient(const SparseMatrix& A, const SparseMatrix& B, const Eigen::VectorXd& u) {
  const double den = u.dot(B * u);
  if (!(den > 0.0)) throw std::domain_error("Rayleigh quotient: b_w(u, u) is zero");
  return u.dot(A * u) / den;
}

double rayleigh_quotient(const AssembledForms& forms, const WeakFunction& u) {
  return rayleigh_quotient(forms.A, forms.B, u.coefficients());
}

Correction correct_eigenfunction(const AssembledForms& target, const SpdSystemSolver& solver,
                                 double lambda, const WeakFunction& u, double linear_tol) {
  const auto start = Clock::now();
  const Eigen::VectorXd rhs = lambda * assemble_cross_mass(u, *target.space);
  const double transfer = seconds_since(start);

  Correction c = solve_correction(target, solver, rhs, linear_tol);
  c.transfer_seconds = transfer;
  return c;
}

AcceleratedRun two_grid_all(std::shared_ptr<const Mesh> coarse_mesh, int refinements, int k,
                            double epsilon, int nev, const AlgorithmOptions& options) {
  if (refinements < 1) throw std::invalid_argument("two-grid needs at least one refinement");
  validate_epsilon(epsilon);
  const auto start = Clock::now();
  CoarseSolve coarse = coarse_eigensolve(coarse_mesh, k, epsilon, nev, options);
  const double coarse_seconds = seconds_since(start);

  auto fine_start = Clock::now();
  Mesh fine = *coarse_mesh;
  for (int r = 0; r < refinements; ++r) fine = fine.refine_uniform();
  auto fine_space =
      std::make_shared<const WgSpace>(std::make_shared<const Mesh>(std::move(fine)), k);
  const double refine_seconds = seconds_since(fine_start);

  AcceleratedRun run =
      correct_all(std::move(coarse), fine_space, epsilon, nev, options, coarse_seconds);
  run.shared.fine_solve += refine_seconds;
  return run;
}

AcceleratedResult two_grid(std::shared_ptr<const Mesh> coarse_mesh, int refinements, int k,
                           double epsilon, int index, const AlgorithmOptions& options) {
  check_index(index);
  AcceleratedRun run = two_grid_all(std::move(coarse_mesh), refinements, k, epsilon, index, options);
  AcceleratedResult r = run.results.at(index - 1);
  r.timing.coarse_solve += run.shared.coarse_solve;
  r.timing.fine_solve += run.shared.fine_solve;
  r.timing.transfer += run.shared.transfer;
  return r;
}

AcceleratedRun two_space_all(std::shared_ptr<const Mesh> mesh, int k1, int k2, double epsilon,
                             int nev, const AlgorithmOptions& options) {
  if (k1 < 1 || k2 < k1) throw std::invalid_argument("two-space needs 1 <= k1 <= k2");
  validate_epsilon(epsilon);
  const auto start = Clock::now();
  CoarseSolve low = coarse_eigensolve(mesh, k1, epsilon, nev, options);
  const double coarse_seconds = seconds_since(start);
  // Reuse the low-degree space's mesh object so the cross mass sees one mesh.
  auto high = std::make_shared<const WgSpace>(low.space->mesh_ptr(), k2);
  return correct_all(std::move(low), high, epsilon, nev, options, coarse_seconds);
}

AcceleratedResult two_space(std::shared_ptr<const Mesh> mesh, int k1, int k2, double epsilon,
                            int index, const AlgorithmOptions& options) {
  check_index(index);
  AcceleratedRun run = two_space_all(std::move(mesh), k1, k2, epsilon, index, options);
  AcceleratedResult r = run.results.at(index - 1);
  r.timing.coarse_solve += run.shared.coarse_solve;
  r.timing.fine_solve += run.shared.fine_solve;
  r.timing.transfer += run.shared.transfer;
  return r;
}

}  // namespace wgeig
