#include "wgeig/polyspace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

namespace wgeig {

Point map_to_triangle(const Mesh& mesh, int t, const Eigen::Vector2d& ref) {
  const Point p0 = mesh.vertex(t, 0);
  return p0 + ref.x() * (mesh.vertex(t, 1) - p0) + ref.y() * (mesh.vertex(t, 2) - p0);
}

ElementBasis::ElementBasis(const Mesh& mesh, int triangle, int degree) : degree_(degree) {
  if (degree < 0) throw std::invalid_argument("ElementBasis: negative degree");
  center_ = (mesh.vertex(triangle, 0) + mesh.vertex(triangle, 1) + mesh.vertex(triangle, 2)) / 3.0;
  scale_ = mesh.diameter(triangle);

  const int n = dim();
  const QuadratureRule& rule = cached_triangle_rule(2 * degree);
  const double jac = 2.0 * mesh.area(triangle);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd m = monomials(map_to_triangle(mesh, triangle, rule.points[q]));
    gram.noalias() += (rule.weights[q] * jac) * m * m.transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("singular element mass matrix on triangle " +
                             std::to_string(triangle));
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  coeff_ = lower.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));
}

Eigen::VectorXd ElementBasis::monomials(const Point& x) const {
  const double xi = (x.x() - center_.x()) / scale_;
  const double eta = (x.y() - center_.y()) / scale_;
  Eigen::VectorXd m(dim());
  int idx = 0;
  for (int d = 0; d <= degree_; ++d) {
    for (int j = 0; j <= d; ++j) {
      m[idx++] = std::pow(xi, d - j) * std::pow(eta, j);
    }
  }
  return m;
}

Eigen::VectorXd ElementBasis::values(const Point& x) const { return coeff_ * monomials(x); }

Eigen::MatrixX2d ElementBasis::gradients(const Point& x) const {
  const double xi = (x.x() - center_.x()) / scale_;
  const double eta = (x.y() - center_.y()) / scale_;
  Eigen::MatrixX2d dm(dim(), 2);
  int idx = 0;
  for (int d = 0; d <= degree_; ++d) {
    for (int j = 0; j <= d; ++j) {
      const int a = d - j;
      dm(idx, 0) = a > 0 ? a * std::pow(xi, a - 1) * std::pow(eta, j) / scale_ : 0.0;
      dm(idx, 1) = j > 0 ? j * std::pow(xi, a) * std::pow(eta, j - 1) / scale_ : 0.0;
      ++idx;
    }
  }
  return coeff_ * dm;
}

Eigen::VectorXd edge_basis_values(int count, double s, double length) {
  Eigen::VectorXd v(count);
  const double x = 2.0 * s - 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int j = 0; j < count; ++j) {
    double pj;
    if (j == 0) {
      pj = 1.0;
    } else if (j == 1) {
      pj = x;
    } else {
      pj = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = pj;
    }
    v[j] = std::sqrt((2.0 * j + 1.0) / length) * pj;
  }
  return v;
}

WgSpace::WgSpace(std::shared_ptr<const Mesh> mesh, int degree)
    : mesh_(std::move(mesh)), degree_(degree) {
  if (!mesh_) throw std::invalid_argument("WgSpace: null mesh");
  if (degree_ < 1) throw std::invalid_argument("WgSpace: degree must be >= 1");
  n0_ = mesh_->num_triangles() * interior_dofs_per_element();
  edge_offset_.assign(mesh_->num_edges(), -1);
  int next = n0_;
  for (int e = 0; e < mesh_->num_edges(); ++e) {
    if (mesh_->edges()[e].boundary()) continue;
    edge_offset_[e] = next;
    next += degree_;
  }
  nb_ = next - n0_;
  bases_.reserve(mesh_->num_triangles());
  for (int t = 0; t < mesh_->num_triangles(); ++t) bases_.emplace_back(*mesh_, t, degree_);
}

std::vector<int> WgSpace::local_dofs(int t) const {
  const int nk = interior_dofs_per_element();
  std::vector<int> dofs(num_local_dofs());
  for (int i = 0; i < nk; ++i) dofs[i] = interior_offset(t) + i;
  const auto& te = mesh_->triangle_edges(t);
  for (int le = 0; le < 3; ++le) {
    const int off = edge_offset_[te[le]];
    for (int j = 0; j < degree_; ++j) dofs[nk + le * degree_ + j] = off < 0 ? -1 : off + j;
  }
  return dofs;
}

WeakFunction::WeakFunction(std::shared_ptr<const WgSpace> space, Eigen::VectorXd coefficients)
    : space_(std::move(space)), coeffs_(std::move(coefficients)) {
  if (!space_) throw std::invalid_argument("WeakFunction: null space");
  if (coeffs_.size() != space_->num_dofs()) {
    throw std::invalid_argument("WeakFunction: coefficient length " +
                                std::to_string(coeffs_.size()) + " does not match space size " +
                                std::to_string(space_->num_dofs()));
  }
}

WeakFunction::WeakFunction(std::shared_ptr<const WgSpace> space)
    : WeakFunction(space, Eigen::VectorXd::Zero(space ? space->num_dofs() : 0)) {}

double WeakFunction::interior_value(int t, const Point& x) const {
  const int nk = space_->interior_dofs_per_element();
  return space_->basis(t).values(x).dot(coeffs_.segment(space_->interior_offset(t), nk));
}

Eigen::VectorXd project_Q0(const ScalarFunction& f, const WgSpace& space, int quad_degree) {
  if (quad_degree < 0) quad_degree = analytic_quadrature_degree(space.degree());
  const Mesh& mesh = space.mesh();
  const int nk = space.interior_dofs_per_element();
  const QuadratureRule& rule = cached_triangle_rule(quad_degree);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_interior_dofs());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double jac = 2.0 * mesh.area(t);
    const ElementBasis& basis = space.basis(t);
    auto c = out.segment(space.interior_offset(t), nk);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = map_to_triangle(mesh, t, rule.points[q]);
      c += (rule.weights[q] * jac * f(x)) * basis.values(x);
    }
  }
  return out;
}

Eigen::VectorXd project_Qb_edge(const ScalarFunction& f, const Mesh& mesh, int edge, int k,
                                int quad_degree) {
  if (quad_degree < 0) quad_degree = analytic_quadrature_degree(k);
  const Edge& ed = mesh.edges().at(edge);
  const Point a = mesh.vertices()[ed.vertices[0]];
  const Point b = mesh.vertices()[ed.vertices[1]];
  const double len = (b - a).norm();
  const QuadratureRule& rule = cached_edge_rule(quad_degree);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q].x();
    c += (rule.weights[q] * len * f(a + s * (b - a))) * edge_basis_values(k, s, len);
  }
  return c;
}

Eigen::VectorXd project_Qb(const ScalarFunction& f, const WgSpace& space, int quad_degree) {
  const Mesh& mesh = space.mesh();
  const int k = space.dofs_per_edge();
  const int n0 = space.num_interior_dofs();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_edge_dofs());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const int off = space.edge_offset(e);
    if (off < 0) continue;
    out.segment(off - n0, k) = project_Qb_edge(f, mesh, e, k, quad_degree);
  }
  return out;
}

WeakFunction project_Qh(const ScalarFunction& f, std::shared_ptr<const WgSpace> space,
                        int quad_degree) {
  Eigen::VectorXd c(space->num_dofs());
  c.head(space->num_interior_dofs()) = project_Q0(f, *space, quad_degree);
  c.tail(space->num_edge_dofs()) = project_Qb(f, *space, quad_degree);
  return WeakFunction(std::move(space), std::move(c));
}

Eigen::VectorXd project_Qbold(const VectorFunction& g, const WgSpace& space, int t,
                              int quad_degree) {
  if (quad_degree < 0) quad_degree = analytic_quadrature_degree(space.degree());
  const Mesh& mesh = space.mesh();
  const int nq = dim_triangle(space.degree() - 1);
  const QuadratureRule& rule = cached_triangle_rule(quad_degree);
  const double jac = 2.0 * mesh.area(t);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * nq);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point x = map_to_triangle(mesh, t, rule.points[q]);
    const Eigen::VectorXd chi = space.basis(t).values(x).head(nq);
    const Eigen::Vector2d gx = g(x);
    const double w = rule.weights[q] * jac;
    c.head(nq) += (w * gx.x()) * chi;
    c.tail(nq) += (w * gx.y()) * chi;
  }
  return c;
}

}  // namespace wgeig
