#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wgeig/assembly.hpp"
#include "wgeig/polyspace.hpp"

namespace wgeig {

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative method stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : std::runtime_error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Sparse Cholesky factorisation of an SPD matrix (CHOLMOD when available).
class SparseCholesky {
 public:
  explicit SparseCholesky(const SparseMatrix& m);
  ~SparseCholesky();
  SparseCholesky(const SparseCholesky&) = delete;
  SparseCholesky& operator=(const SparseCholesky&) = delete;

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  int rows() const { return rows_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int rows_ = 0;
};

/// SPD solver for systems whose leading n0 x n0 block is block diagonal with
/// square blocks of size `block` (the interior-interior coupling of a weak
/// Galerkin matrix). Interior unknowns are eliminated element by element and
/// the remaining edge Schur complement is factorised.
///
/// With block == 0 the whole matrix is factorised directly.
class SpdSystemSolver {
 public:
  SpdSystemSolver(const SparseMatrix& A, int n0, int block);
  ~SpdSystemSolver();

  int size() const { return n_; }
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  int n_ = 0;
  int n0_ = 0;
  int block_ = 0;
  SparseMatrix interior_inverse_;  // block diagonal
  SparseMatrix coupling_0b_;       // A_0b
  SparseMatrix coupling_b0_;       // A_b0
  std::unique_ptr<SparseCholesky> factor_;
};

/// Solver for the forms' stiffness matrix using the element block structure.
std::shared_ptr<const SpdSystemSolver> make_system_solver(const AssembledForms& forms);

/// Solves A x = rhs for SPD A, checking ||A x - rhs|| <= tol ||rhs||
/// (with up to three refinement sweeps).
Eigen::VectorXd linear_solve(const SparseMatrix& A, const Eigen::VectorXd& rhs, double tol = 1e-10);

/// Same check on an existing factorisation.
Eigen::VectorXd checked_solve(const SpdSystemSolver& solver, const SparseMatrix& A,
                              const Eigen::VectorXd& rhs, double tol = 1e-10);

/// The pencil (A, diag(M0, 0)) reduced to (S, M0) with
/// S = A_00 - A_0b A_bb^{-1} A_b0 on the first n0 unknowns.
///
/// S is never formed for large problems: S^{-1} M0 is applied through a solve
/// with the full A, and S itself through a factorisation of A_bb (built on
/// first use).
class CondensedPencil {
 public:
  CondensedPencil(const SparseMatrix& A, const SparseMatrix& B, int n0, int block);
  explicit CondensedPencil(const AssembledForms& forms);

  int interior_size() const { return n0_; }
  int full_size() const { return static_cast<int>(A_.rows()); }
  const SparseMatrix& interior_mass() const { return M0_; }
  const SpdSystemSolver& system_solver() const { return *solver_; }

  /// Solves A w = [rhs0; 0]; returns the full vectors w.
  Eigen::MatrixXd solve_full(const Eigen::MatrixXd& rhs0) const;
  /// S^{-1} y on interior vectors.
  Eigen::MatrixXd apply_S_inverse(const Eigen::MatrixXd& y0) const;
  /// S x on interior vectors.
  Eigen::MatrixXd apply_S(const Eigen::MatrixXd& x0) const;
  /// Full vector [u0; -A_bb^{-1} A_b0 u0].
  Eigen::VectorXd recover(const Eigen::VectorXd& u0) const;
  /// Dense S, for small problems and tests.
  Eigen::MatrixXd dense_S() const;

 private:
  const SparseCholesky& edge_factor() const;

  SparseMatrix A_;
  SparseMatrix M0_;
  SparseMatrix A00_, A0b_, Ab0_, Abb_;
  int n0_ = 0;
  std::shared_ptr<const SpdSystemSolver> solver_;
  mutable std::once_flag edge_once_;
  mutable std::unique_ptr<SparseCholesky> edge_factor_;
};

inline CondensedPencil condense(const AssembledForms& forms) { return CondensedPencil(forms); }

enum class EigenMode { condensed_shift_invert, dense_oracle };

struct EigenOptions {
  double tol = 1e-10;
  int max_iterations = 500;
  EigenMode mode = EigenMode::condensed_shift_invert;
  std::uint64_t seed = 0x5eed2017ULL;
  int subspace_size = 0;  // 0: max(2 nev, nev + 8)
  /// Eigenvalues closer than this (relative) are flagged as one cluster.
  double cluster_gap = 1e-6;
  /// Condensed problems with at most this many interior unknowns are solved
  /// with a dense eigensolver on (S, M0) instead of subspace iteration.
  int dense_limit = 600;
};

/// Raw eigenpairs of a pencil: columns of `vectors` are full-length,
/// normalised so that u^T B u = 1.
struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  std::vector<double> residuals;
  int iterations = 0;
};

/// The nev smallest finite eigenvalues of A u = lambda B u, where B vanishes
/// outside its leading n0 x n0 block. `block` is the interior block size used by
/// SpdSystemSolver (0 for a generic A).
Eigenpairs eigensolve_pencil(const SparseMatrix& A, const SparseMatrix& B, int n0, int block,
                             int nev, const EigenOptions& options = {});

struct EigenResult {
  std::vector<double> eigenvalues;        // ascending
  std::vector<WeakFunction> eigenvectors; // ||u||_b = 1
  std::vector<double> residuals;          // ||A u - lambda B u||_2
  std::vector<int> cluster;               // cluster id per eigenvalue
  int iterations = 0;
  double norm_estimate = 0.0;             // ||A||_inf
};

EigenResult eigensolve(const AssembledForms& forms, int nev, const EigenOptions& options = {});

/// Infinity norm (max absolute row sum).
double norm_inf(const SparseMatrix& m);

/// Cluster ids for ascending values with the given relative gap.
std::vector<int> cluster_ids(const std::vector<double>& values, double relative_gap);

}  // namespace wgeig
