#include "wgeig/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace wgeig {

namespace {

struct EdgeGeometry {
  Point a;          // start of the global edge parametrisation
  Point b;
  double length;
};

EdgeGeometry edge_geometry(const Mesh& mesh, int e) {
  const Edge& ed = mesh.edges()[e];
  const Point a = mesh.vertices()[ed.vertices[0]];
  const Point b = mesh.vertices()[ed.vertices[1]];
  return {a, b, (b - a).norm()};
}

}  // namespace

Eigen::MatrixXd trace_projection(const WgSpace& space, int t, int local_edge) {
  const Mesh& mesh = space.mesh();
  const int k = space.degree();
  const int nk = space.interior_dofs_per_element();
  const EdgeGeometry g = edge_geometry(mesh, mesh.triangle_edges(t)[local_edge]);
  const QuadratureRule& rule = cached_edge_rule(2 * k);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(k, nk);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double s = rule.points[q].x();
    const Point x = g.a + s * (g.b - g.a);
    p.noalias() += (rule.weights[q] * g.length) * edge_basis_values(k, s, g.length) *
                   space.basis(t).values(x).transpose();
  }
  return p;
}

Eigen::MatrixXd trace_mismatch(const WgSpace& space, int t) {
  const int k = space.degree();
  const int nk = space.interior_dofs_per_element();
  const int nl = space.num_local_dofs();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nl, nl);
  for (int le = 0; le < 3; ++le) {
    Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(k, nl);
    jump.leftCols(nk) = trace_projection(space, t, le);
    jump.block(0, nk + le * k, k, k) = -Eigen::MatrixXd::Identity(k, k);
    m.noalias() += jump.transpose() * jump;
  }
  return m;
}

namespace {

void symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

void add_local(std::vector<Eigen::Triplet<double>>& triplets, const std::vector<int>& dofs,
               const Eigen::MatrixXd& local) {
  const int n = static_cast<int>(dofs.size());
  for (int j = 0; j < n; ++j) {
    if (dofs[j] < 0) continue;
    for (int i = 0; i < n; ++i) {
      if (dofs[i] < 0) continue;
      triplets.emplace_back(dofs[i], dofs[j], local(i, j));
    }
  }
}

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (count + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int begin = w * chunk;
    const int end = std::min(count, begin + chunk);
    pool.emplace_back([&fn, begin, end] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

void validate_epsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  }
}

double stabilization_weight(const Mesh& mesh, int t, double epsilon) {
  return std::pow(mesh.diameter(t), -1.0 + epsilon);
}

LocalWeakGradient local_weak_gradient(const WgSpace& space, int element) {
  const Mesh& mesh = space.mesh();
  const int k = space.degree();
  const int nk = space.interior_dofs_per_element();
  const int nq = dim_triangle(k - 1);
  const ElementBasis& basis = space.basis(element);

  LocalWeakGradient out;
  out.element = element;
  out.matrix = Eigen::MatrixXd::Zero(2 * nq, space.num_local_dofs());

  // -(v0, div q)_T with q = (chi_m, 0) and (0, chi_m).
  const QuadratureRule& tri = cached_triangle_rule(2 * k);
  const double jac = 2.0 * mesh.area(element);
  for (std::size_t q = 0; q < tri.size(); ++q) {
    const Point x = map_to_triangle(mesh, element, tri.points[q]);
    const double w = tri.weights[q] * jac;
    const Eigen::VectorXd psi = basis.values(x);
    const Eigen::MatrixX2d dchi = basis.gradients(x).topRows(nq);
    out.matrix.block(0, 0, nq, nk).noalias() -= w * dchi.col(0) * psi.transpose();
    out.matrix.block(nq, 0, nq, nk).noalias() -= w * dchi.col(1) * psi.transpose();
  }

  // <v_b, q.n>_{dT}
  const QuadratureRule& line = cached_edge_rule(2 * k);
  for (int le = 0; le < 3; ++le) {
    const Point n = mesh.outward_normal(element, le);
    const EdgeGeometry g = edge_geometry(mesh, mesh.triangle_edges(element)[le]);
    for (std::size_t q = 0; q < line.size(); ++q) {
      const double s = line.points[q].x();
      const Point x = g.a + s * (g.b - g.a);
      const double w = line.weights[q] * g.length;
      const Eigen::VectorXd chi = basis.values(x).head(nq);
      const Eigen::VectorXd phi = edge_basis_values(k, s, g.length);
      out.matrix.block(0, nk + le * k, nq, k).noalias() += (w * n.x()) * chi * phi.transpose();
      out.matrix.block(nq, nk + le * k, nq, k).noalias() += (w * n.y()) * chi * phi.transpose();
    }
  }
  // The vector basis is orthonormal, so the right-hand side above already
  // holds the weak gradient coefficients.
  return out;
}

ElementMatrices element_matrices(const WgSpace& space, int element, double epsilon) {
  const Mesh& mesh = space.mesh();
  const int nk = space.interior_dofs_per_element();
  const LocalWeakGradient grad = local_weak_gradient(space, element);

  ElementMatrices out;
  out.stabilization = stabilization_weight(mesh, element, epsilon) * trace_mismatch(space, element);
  symmetrize(out.stabilization);
  out.stiffness = grad.matrix.transpose() * grad.matrix;
  symmetrize(out.stiffness);
  out.stiffness += out.stabilization;

  const QuadratureRule& tri = cached_triangle_rule(2 * space.degree());
  const double jac = 2.0 * mesh.area(element);
  out.mass = Eigen::MatrixXd::Zero(nk, nk);
  for (std::size_t q = 0; q < tri.size(); ++q) {
    const Eigen::VectorXd psi =
        space.basis(element).values(map_to_triangle(mesh, element, tri.points[q]));
    out.mass.noalias() += (tri.weights[q] * jac) * psi * psi.transpose();
  }
  symmetrize(out.mass);
  return out;
}

AssembledForms assemble_forms(std::shared_ptr<const WgSpace> space, double epsilon,
                              const AssemblyOptions& options) {
  validate_epsilon(epsilon);
  const int nt = space->mesh().num_triangles();
  std::vector<ElementMatrices> locals(nt);
  parallel_for(nt, options.threads,
               [&](int t) { locals[t] = element_matrices(*space, t, epsilon); });

  const int n = space->num_dofs();
  const int nl = space->num_local_dofs();
  const int nk = space->interior_dofs_per_element();
  std::vector<Eigen::Triplet<double>> ta, ts, tb;
  ta.reserve(static_cast<std::size_t>(nt) * nl * nl);
  ts.reserve(static_cast<std::size_t>(nt) * nl * nl);
  tb.reserve(static_cast<std::size_t>(nt) * nk * nk);
  for (int t = 0; t < nt; ++t) {
    const std::vector<int> dofs = space->local_dofs(t);
    add_local(ta, dofs, locals[t].stiffness);
    add_local(ts, dofs, locals[t].stabilization);
    const std::vector<int> idofs(dofs.begin(), dofs.begin() + nk);
    add_local(tb, idofs, locals[t].mass);
  }

  AssembledForms forms;
  forms.space = space;
  forms.epsilon = epsilon;
  forms.A.resize(n, n);
  forms.S.resize(n, n);
  forms.B.resize(n, n);
  forms.A.setFromTriplets(ta.begin(), ta.end());
  forms.S.setFromTriplets(ts.begin(), ts.end());
  forms.B.setFromTriplets(tb.begin(), tb.end());
  return forms;
}

AssembledForms assemble_stiffness(std::shared_ptr<const WgSpace> space, double epsilon,
                                  const AssemblyOptions& options) {
  AssembledForms forms = assemble_forms(std::move(space), epsilon, options);
  forms.B = SparseMatrix();
  return forms;
}

SparseMatrix assemble_mass(const WgSpace& space) {
  const Mesh& mesh = space.mesh();
  const int nk = space.interior_dofs_per_element();
  const QuadratureRule& tri = cached_triangle_rule(2 * space.degree());
  std::vector<Eigen::Triplet<double>> tb;
  tb.reserve(static_cast<std::size_t>(mesh.num_triangles()) * nk * nk);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double jac = 2.0 * mesh.area(t);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nk, nk);
    for (std::size_t q = 0; q < tri.size(); ++q) {
      const Eigen::VectorXd psi = space.basis(t).values(map_to_triangle(mesh, t, tri.points[q]));
      m.noalias() += (tri.weights[q] * jac) * psi * psi.transpose();
    }
    symmetrize(m);
    std::vector<int> dofs(nk);
    for (int i = 0; i < nk; ++i) dofs[i] = space.interior_offset(t) + i;
    add_local(tb, dofs, m);
  }
  SparseMatrix b(space.num_dofs(), space.num_dofs());
  b.setFromTriplets(tb.begin(), tb.end());
  return b;
}

namespace {

// Throws unless `test_space` can receive a cross mass from `trial_space`.
// Returns true when both share one mesh.
bool check_transfer(const WgSpace& trial_space, const WgSpace& test_space) {
  const Mesh& coarse = trial_space.mesh();
  const Mesh& fine = test_space.mesh();
  const bool same_mesh = &coarse == &fine;
  if (same_mesh) {
    if (trial_space.degree() > test_space.degree()) {
      throw std::invalid_argument("cross mass: trial degree exceeds test degree on the same mesh");
    }
  } else if (!fine.descends_from(coarse)) {
    throw AncestryError("cross mass: test mesh is not a refinement of the trial mesh");
  }
  return same_mesh;
}

}  // namespace

Eigen::VectorXd assemble_cross_mass(const WeakFunction& trial, const WgSpace& test_space) {
  const WgSpace& trial_space = trial.space();
  const Mesh& coarse = trial_space.mesh();
  const Mesh& fine = test_space.mesh();
  const bool same_mesh = check_transfer(trial_space, test_space);

  const int coarse_level = coarse.level();
  const int nk_test = test_space.interior_dofs_per_element();
  const QuadratureRule& tri = cached_triangle_rule(trial_space.degree() + test_space.degree());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(test_space.num_dofs());
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const int tc = same_mesh ? t : fine.ancestor_at_level(t, coarse_level);
    const double jac = 2.0 * fine.area(t);
    auto ft = f.segment(test_space.interior_offset(t), nk_test);
    for (std::size_t q = 0; q < tri.size(); ++q) {
      const Point x = map_to_triangle(fine, t, tri.points[q]);
      ft += (tri.weights[q] * jac * trial.interior_value(tc, x)) * test_space.basis(t).values(x);
    }
  }
  return f;
}

SparseMatrix assemble_transfer(const WgSpace& trial_space, const WgSpace& test_space) {
  const Mesh& coarse = trial_space.mesh();
  const Mesh& fine = test_space.mesh();
  const bool same_mesh = check_transfer(trial_space, test_space);
  const int coarse_level = coarse.level();
  const int nk_test = test_space.interior_dofs_per_element();
  const int nk_trial = trial_space.interior_dofs_per_element();
  const QuadratureRule& tri = cached_triangle_rule(trial_space.degree() + test_space.degree());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(fine.num_triangles()) * nk_test * nk_trial);
  Eigen::MatrixXd local(nk_test, nk_trial);
  for (int t = 0; t < fine.num_triangles(); ++t) {
    const int tc = same_mesh ? t : fine.ancestor_at_level(t, coarse_level);
    const double jac = 2.0 * fine.area(t);
    local.setZero();
    for (std::size_t q = 0; q < tri.size(); ++q) {
      const Point x = map_to_triangle(fine, t, tri.points[q]);
      local.noalias() += (tri.weights[q] * jac) * test_space.basis(t).values(x) *
                         trial_space.basis(tc).values(x).transpose();
    }
    const int r0 = test_space.interior_offset(t);
    const int c0 = trial_space.interior_offset(tc);
    for (int i = 0; i < nk_test; ++i)
      for (int j = 0; j < nk_trial; ++j) trip.emplace_back(r0 + i, c0 + j, local(i, j));
  }
  SparseMatrix p(test_space.num_dofs(), trial_space.num_dofs());
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

Eigen::VectorXd assemble_load(const ScalarFunction& f, const WgSpace& space, int quad_degree) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.num_dofs());
  out.head(space.num_interior_dofs()) = project_Q0(f, space, quad_degree);
  return out;
}

SparseMatrix assemble_v_norm(const WgSpace& space) {
  const Mesh& mesh = space.mesh();
  const int nk = space.interior_dofs_per_element();
  const QuadratureRule& tri = cached_triangle_rule(2 * space.degree());
  std::vector<Eigen::Triplet<double>> trip;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double jac = 2.0 * mesh.area(t);
    Eigen::MatrixXd local = trace_mismatch(space, t) / mesh.diameter(t);
    for (std::size_t q = 0; q < tri.size(); ++q) {
      const Eigen::MatrixX2d g =
          space.basis(t).gradients(map_to_triangle(mesh, t, tri.points[q]));
      local.topLeftCorner(nk, nk).noalias() += (tri.weights[q] * jac) * g * g.transpose();
    }
    symmetrize(local);
    add_local(trip, space.local_dofs(t), local);
  }
  SparseMatrix v(space.num_dofs(), space.num_dofs());
  v.setFromTriplets(trip.begin(), trip.end());
  return v;
}

void write_matrix_market(std::ostream& os, const SparseMatrix& m) {
  std::size_t nnz = 0;
  for (int j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it)
      if (it.row() >= it.col()) ++nnz;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  os.precision(17);
  for (int j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it)
      if (it.row() >= it.col()) os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace wgeig
