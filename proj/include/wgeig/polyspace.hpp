#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wgeig/mesh.hpp"
#include "wgeig/quadrature.hpp"

namespace wgeig {

using ScalarFunction = std::function<double(const Point&)>;
using VectorFunction = std::function<Eigen::Vector2d(const Point&)>;

/// Dimension of P_k on a triangle.
constexpr int dim_triangle(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

/// L2(T)-orthonormal basis of P_k(T).
///
/// Built from monomials in the scaled local coordinates ((x, y) - centroid) / h_T,
/// ordered by total degree, orthonormalised by Cholesky of their mass matrix.
/// The ordering makes the leading dim_triangle(j) functions an orthonormal
/// basis of P_j(T) for every j <= k.
class ElementBasis {
 public:
  ElementBasis() = default;
  ElementBasis(const Mesh& mesh, int triangle, int degree);

  int degree() const { return degree_; }
  int dim() const { return dim_triangle(degree_); }

  Eigen::VectorXd values(const Point& x) const;
  /// Rows are basis functions, columns d/dx and d/dy.
  Eigen::MatrixX2d gradients(const Point& x) const;

 private:
  Eigen::VectorXd monomials(const Point& x) const;

  int degree_ = 0;
  Point center_ = Point::Zero();
  double scale_ = 1.0;
  Eigen::MatrixXd coeff_;  // lower triangular: psi = coeff_ * monomials
};

/// L2(e)-orthonormal Legendre basis of P_{count-1} on an edge of the given
/// length, evaluated at the edge parameter s in [0,1].
Eigen::VectorXd edge_basis_values(int count, double s, double length);

/// Physical quadrature point of reference point `ref` on triangle t.
Point map_to_triangle(const Mesh& mesh, int t, const Eigen::Vector2d& ref);

/// Degree-k weak Galerkin space: P_k interior polynomials on each triangle and
/// P_{k-1} traces on interior edges. Boundary edges carry no unknowns (v_b = 0).
///
/// Global numbering: interior block [0, n0) with element t owning
/// [t*dim(P_k), (t+1)*dim(P_k)), then the edge block [n0, n0+nb) with k
/// unknowns per interior edge in mesh edge order.
class WgSpace {
 public:
  WgSpace(std::shared_ptr<const Mesh> mesh, int degree);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  int degree() const { return degree_; }

  int interior_dofs_per_element() const { return dim_triangle(degree_); }
  int dofs_per_edge() const { return degree_; }
  int num_interior_dofs() const { return n0_; }
  int num_edge_dofs() const { return nb_; }
  int num_dofs() const { return n0_ + nb_; }

  int interior_offset(int t) const { return t * interior_dofs_per_element(); }
  /// First global unknown of edge e, or -1 for a boundary edge.
  int edge_offset(int e) const { return edge_offset_[e]; }

  /// Global unknowns of element t: interior block, then k per local edge
  /// (entries -1 on boundary edges).
  std::vector<int> local_dofs(int t) const;
  int num_local_dofs() const { return interior_dofs_per_element() + 3 * dofs_per_edge(); }

  const ElementBasis& basis(int t) const { return bases_[t]; }

 private:
  std::shared_ptr<const Mesh> mesh_;
  int degree_;
  int n0_ = 0;
  int nb_ = 0;
  std::vector<int> edge_offset_;
  std::vector<ElementBasis> bases_;
};

/// Coefficient vector of v = {v0, v_b} over a WgSpace.
class WeakFunction {
 public:
  WeakFunction(std::shared_ptr<const WgSpace> space, Eigen::VectorXd coefficients);
  explicit WeakFunction(std::shared_ptr<const WgSpace> space);

  const WgSpace& space() const { return *space_; }
  const std::shared_ptr<const WgSpace>& space_ptr() const { return space_; }

  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  Eigen::VectorXd& coefficients() { return coeffs_; }

  auto interior() const { return coeffs_.head(space_->num_interior_dofs()); }
  auto edges() const { return coeffs_.tail(space_->num_edge_dofs()); }

  /// v0 restricted to triangle t, evaluated at x.
  double interior_value(int t, const Point& x) const;

 private:
  std::shared_ptr<const WgSpace> space_;
  Eigen::VectorXd coeffs_;
};

/// Default quadrature exactness for projecting analytic data onto P_k.
inline int analytic_quadrature_degree(int k) { return 2 * k + 6; }

/// Element-wise L2 projection onto P_k(T); returns the interior block.
Eigen::VectorXd project_Q0(const ScalarFunction& f, const WgSpace& space, int quad_degree = -1);

/// L2 projection onto P_{k-1}(e) of a single edge (k coefficients).
Eigen::VectorXd project_Qb_edge(const ScalarFunction& f, const Mesh& mesh, int edge, int k,
                                int quad_degree = -1);

/// Edge block of Q_h f (interior edges only).
Eigen::VectorXd project_Qb(const ScalarFunction& f, const WgSpace& space, int quad_degree = -1);

/// Q_h f = {Q0 f, Qb f}. f is assumed to vanish on the boundary.
WeakFunction project_Qh(const ScalarFunction& f, std::shared_ptr<const WgSpace> space,
                        int quad_degree = -1);

/// Componentwise L2 projection of g onto [P_{k-1}(T)]^2 on element t.
/// Layout: x-component coefficients, then y-component coefficients, both in
/// the leading dim(P_{k-1}) functions of the element basis.
Eigen::VectorXd project_Qbold(const VectorFunction& g, const WgSpace& space, int t,
                              int quad_degree = -1);

}  // namespace wgeig
