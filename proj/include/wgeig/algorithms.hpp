#pragma once

#include <memory>
#include <vector>

#include "wgeig/assembly.hpp"
#include "wgeig/mesh.hpp"
#include "wgeig/polyspace.hpp"
#include "wgeig/solvers.hpp"

namespace wgeig {

struct AlgorithmOptions {
  EigenOptions eigen;
  double linear_tol = 1e-10;
  AssemblyOptions assembly;
  /// Extra coarse eigenpairs computed beyond the requested count so that a
  /// cluster cut by the last requested index is still resolved.
  int cluster_slack = 2;
};

/// Wall-clock seconds.
struct Timing {
  double coarse_solve = 0.0;  // coarse (or low-degree) assembly + eigensolve
  double transfer = 0.0;      // cross-mass right-hand side
  double fine_solve = 0.0;    // fine assembly + factorisation + solve
  double quotient = 0.0;      // Rayleigh quotient
  double total() const { return coarse_solve + transfer + fine_solve + quotient; }
};

struct DirectResult {
  std::shared_ptr<const WgSpace> space;
  AssembledForms forms;
  EigenResult eig;
  double seconds = 0.0;
};

/// a_s(u, v) = lambda b_w(u, v) on the degree-k space over `mesh`.
DirectResult direct_wg(std::shared_ptr<const Mesh> mesh, int k, double epsilon, int nev,
                       const AlgorithmOptions& options = {});

/// u^T A u / u^T B u. Throws std::domain_error when u^T B u == 0.
double rayleigh_quotient(const SparseMatrix& A, const SparseMatrix& B, const Eigen::VectorXd& u);
double rayleigh_quotient(const AssembledForms& forms, const WeakFunction& u);

struct Correction {
  WeakFunction function;  // normalised to ||u||_b = 1
  double rayleigh = 0.0;
  double transfer_seconds = 0.0;
  double solve_seconds = 0.0;
  double quotient_seconds = 0.0;
};

/// Solves a_s(w, v) = lambda b_w(u, v) for all v in the target space and
/// returns w with its Rayleigh quotient. `u` may live on a coarser mesh of the
/// same lineage or on the same mesh with a lower degree.
Correction correct_eigenfunction(const AssembledForms& target, const SpdSystemSolver& solver,
                                 double lambda, const WeakFunction& u, double linear_tol = 1e-10);

/// Result of an accelerated scheme for one eigenvalue index.
struct AcceleratedResult {
  int index = 0;                        // 1-based
  double coarse_eigenvalue = 0.0;       // lambda_H or lambda_h^1
  WeakFunction coarse_eigenfunction;    // u_H or u_h^1
  WeakFunction corrected;               // ~u_h or ^u_h, ||.||_b = 1
  double eigenvalue = 0.0;              // Rayleigh quotient of the correction
  Timing timing;
};

/// All corrected indices of one accelerated run, sharing the coarse solve and
/// the fine factorisation.
struct AcceleratedRun {
  std::shared_ptr<const WgSpace> coarse_space;
  std::shared_ptr<const WgSpace> fine_space;
  AssembledForms fine_forms;
  EigenResult coarse;
  std::vector<AcceleratedResult> results;
  Timing shared;  // coarse solve and fine assembly/factorisation
};

/// Two-grid scheme: coarse eigensolve on `coarse_mesh`, `refinements` >= 1 red
/// refinements, one fine linear solve per index, Rayleigh quotient.
AcceleratedRun two_grid_all(std::shared_ptr<const Mesh> coarse_mesh, int refinements, int k,
                            double epsilon, int nev, const AlgorithmOptions& options = {});
AcceleratedResult two_grid(std::shared_ptr<const Mesh> coarse_mesh, int refinements, int k,
                           double epsilon, int index, const AlgorithmOptions& options = {});

/// Two-space scheme: eigensolve in degree k1, one linear solve in degree k2 on
/// the same mesh, Rayleigh quotient. Requires 1 <= k1 <= k2.
AcceleratedRun two_space_all(std::shared_ptr<const Mesh> mesh, int k1, int k2, double epsilon,
                             int nev, const AlgorithmOptions& options = {});
AcceleratedResult two_space(std::shared_ptr<const Mesh> mesh, int k1, int k2, double epsilon,
                            int index, const AlgorithmOptions& options = {});

}  // namespace wgeig
