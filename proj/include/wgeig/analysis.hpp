#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wgeig/assembly.hpp"
#include "wgeig/polyspace.hpp"

namespace wgeig {

/// One eigenvalue of the continuous problem with an L2-orthonormal basis of
/// its eigenspace.
struct ExactCluster {
  double eigenvalue = 0.0;
  std::vector<ScalarFunction> functions;
};

/// Reference Dirichlet spectrum. Known in closed form on the unit square
/// ((m^2 + n^2) pi^2, eigenfunctions 2 sin(m pi x) sin(n pi y)); unknown on
/// the L-shape, where only monotonicity across levels can be checked.
class ExactSpectrum {
 public:
  /// Unit square, enough clusters to cover the first `count` eigenvalues.
  static ExactSpectrum unit_square(int count);
  static ExactSpectrum unknown();

  bool known() const { return !clusters_.empty(); }
  /// Eigenvalue j (1-based) counted with multiplicity.
  double eigenvalue(int j) const;
  /// Cluster containing eigenvalue j (1-based).
  const ExactCluster& cluster_of(int j) const;
  int size() const;

 private:
  std::vector<ExactCluster> clusters_;
};

/// Theoretical convergence exponents.
struct OrderModel {
  int k = 1;          // degree (k1 for the two-space scheme)
  int k2 = 0;         // high degree of the two-space scheme, 0 otherwise
  double epsilon = 0.0;
  double gamma = 1.0;  // regularity exponent of the dual problem

  /// gamma = 1 for k = 1 or non-convex domains, 2 - eps/2 otherwise.
  static double default_gamma(int k, double epsilon, bool convex);
  static OrderModel make(int k, double epsilon, bool convex, int k2 = 0,
                         std::optional<double> gamma = std::nullopt);

  double k_bar() const;  // min(2k - 2eps, k + gamma - eps)
  double k_hat() const;  // min(4k - 4eps, 2k + 2gamma - 2eps)

  /// Eigenvalue and |||.||| eigenfunction exponents of the direct scheme in h.
  double direct_eigenvalue() const { return 2.0 * k - 2.0 * epsilon; }
  double direct_eigenfunction() const { return k - epsilon; }
  /// Two-grid exponents in the coarse size H (fine error assumed smaller).
  double two_grid_eigenvalue_in_H() const { return 2.0 * k_bar(); }
  double two_grid_eigenfunction_in_H() const { return k_bar(); }
  /// Two-space exponent in h.
  double two_space_eigenvalue() const;
};

enum class ErrorNorm { triple_bar, b, V };

double norm_triple_bar(const AssembledForms& forms, const Eigen::VectorXd& v);
double norm_b(const AssembledForms& forms, const Eigen::VectorXd& v);
double norm_V(const WgSpace& space, const Eigen::VectorXd& v);

/// Matrix of the chosen squared norm on `forms.space`.
SparseMatrix norm_matrix(const AssembledForms& forms, ErrorNorm norm);

/// argmin over |c| = 1 of c^T G c - 2 g^T c for symmetric positive
/// semidefinite G.
Eigen::VectorXd unit_sphere_minimizer(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs);

/// min ||Q_h u - computed|| over unit-L2 members u of the exact eigenspace,
/// in the chosen norm. The exact basis is L2-orthonormal, so this is a
/// minimisation over unit coefficient vectors. Invariant under orthogonal
/// changes of the exact basis and under sign changes of `computed`.
double eigenfunction_error(const AssembledForms& forms, const WeakFunction& computed,
                           const ExactCluster& cluster, ErrorNorm norm = ErrorNorm::triple_bar);

/// Same with the cluster already projected (Q_h of each function) and the
/// norm matrix precomputed.
double eigenfunction_error(const SparseMatrix& norm_matrix, const Eigen::VectorXd& computed,
                           const std::vector<Eigen::VectorXd>& projected_cluster);

/// Observed order between two consecutive levels, ln(e1/e2)/ln(s1/s2), on
/// absolute values. Empty when either error is zero or not finite.
struct OrderEstimate {
  std::optional<double> value;
  bool negative = false;   // both errors negative
  bool sign_flip = false;  // errors of opposite sign
};

OrderEstimate observed_order(double e1, double e2, double s1, double s2);

/// Orders between consecutive entries; result has errors.size() - 1 entries.
std::vector<OrderEstimate> observed_orders(const std::vector<double>& errors,
                                           const std::vector<double>& sizes);

/// Lower-bound flags lambda_j - approx_j >= 0 (1-based j over approx).
std::vector<bool> lower_bound_report(const ExactSpectrum& exact,
                                     const std::vector<double>& approx);

/// For each index, whether its values strictly increase across levels
/// (levels[l][j] is index j at level l).
std::vector<bool> monotone_increase_report(const std::vector<std::vector<double>>& levels);

/// Continuous piecewise-linear interpolant built by averaging v0 at each
/// vertex over the surrounding triangles; zero at boundary vertices.
Eigen::VectorXd conforming_interpolant(const WeakFunction& v);

/// |Pi v|_1 for nodal values of a continuous P1 function.
double p1_seminorm(const Mesh& mesh, const Eigen::VectorXd& nodal);

/// ||v0 - Pi v||_{L2}.
double interpolant_distance(const WeakFunction& v, const Eigen::VectorXd& nodal);

/// Largest ratios seen over random weak functions:
/// stability = |Pi v|_1 / ||v||_V, approximation = ||v0 - Pi v|| / (h ||v||_V).
struct InterpolantConstants {
  double stability = 0.0;
  double approximation = 0.0;
};

InterpolantConstants sample_interpolant_constants(std::shared_ptr<const WgSpace> space,
                                                  int samples, std::uint64_t seed);

}  // namespace wgeig
