#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wgeig/polyspace.hpp"

namespace wgeig {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Weak gradient of the local unknowns of one element.
///
/// `matrix` maps the local vector (interior block, then k trace unknowns per
/// local edge, boundary edges included) to the coefficients of grad_w v in the
/// orthonormal [P_{k-1}(T)]^2 basis: x-components first, then y-components.
struct LocalWeakGradient {
  int element = -1;
  Eigen::MatrixXd matrix;
};

LocalWeakGradient local_weak_gradient(const WgSpace& space, int element);

/// Q_b of every interior basis function on one local edge: entry (j, i) is
/// <psi_i, phi_j>_e in the orthonormal edge basis.
Eigen::MatrixXd trace_projection(const WgSpace& space, int element, int local_edge);

/// sum over the edges of T of <Q_b v0 - v_b, Q_b w0 - w_b>_e (unweighted), in
/// local numbering.
Eigen::MatrixXd trace_mismatch(const WgSpace& space, int element);

/// Element matrices before global assembly (local numbering as in
/// WgSpace::local_dofs).
struct ElementMatrices {
  Eigen::MatrixXd stiffness;      // (grad_w, grad_w) + stabilisation
  Eigen::MatrixXd stabilization;  // stabilisation part alone
  Eigen::MatrixXd mass;           // interior-interior block only (nk x nk)
};

ElementMatrices element_matrices(const WgSpace& space, int element, double epsilon);

/// Stabilisation weight of element t: h_T^{-1+epsilon}.
double stabilization_weight(const Mesh& mesh, int t, double epsilon);

/// Sparse forms a_s (A), s (S) and b_w (B) on a WgSpace.
struct AssembledForms {
  std::shared_ptr<const WgSpace> space;
  double epsilon = 0.0;
  SparseMatrix A;
  SparseMatrix S;
  SparseMatrix B;
};

struct AssemblyOptions {
  /// Worker threads for element matrix computation. Global accumulation is
  /// always serial in element order, so the result does not depend on this.
  int threads = 1;
};

/// Throws std::invalid_argument unless 0 <= epsilon < 1.
void validate_epsilon(double epsilon);

/// Assembles A, S and B.
AssembledForms assemble_forms(std::shared_ptr<const WgSpace> space, double epsilon,
                              const AssemblyOptions& options = {});

/// A and S only (B left empty).
AssembledForms assemble_stiffness(std::shared_ptr<const WgSpace> space, double epsilon,
                                  const AssemblyOptions& options = {});

/// b_w(v, w) = (v0, w0): nonzero only on the interior block.
SparseMatrix assemble_mass(const WgSpace& space);

/// f_i = b_w(trial, phi_i) for every basis function phi_i of `test_space`.
///
/// Either the test mesh is a refinement of the trial mesh (two-grid transfer)
/// or both live on the same mesh with trial degree <= test degree
/// (two-space transfer). Throws AncestryError or std::invalid_argument otherwise.
Eigen::VectorXd assemble_cross_mass(const WeakFunction& trial, const WgSpace& test_space);

/// Matrix P with P u = assemble_cross_mass(u, test_space) for every u in
/// `trial_space`; same preconditions.
SparseMatrix assemble_transfer(const WgSpace& trial_space, const WgSpace& test_space);

/// Load vector (f, phi_i0); edge entries are zero.
Eigen::VectorXd assemble_load(const ScalarFunction& f, const WgSpace& space,
                              int quad_degree = -1);

/// Matrix of ||v||_V^2 = sum_T ||grad v0||_T^2 + h_T^{-1} ||Q_b v0 - v_b||_{dT}^2.
SparseMatrix assemble_v_norm(const WgSpace& space);

/// Writes the lower triangle of a symmetric matrix in Matrix Market
/// coordinate format.
void write_matrix_market(std::ostream& os, const SparseMatrix& m);

}  // namespace wgeig
