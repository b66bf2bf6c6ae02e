#include "wgeig/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace wgeig {

ExactSpectrum ExactSpectrum::unit_square(int count) {
  if (count < 1) throw std::invalid_argument("unit_square spectrum: count must be >= 1");
  const double pi = std::numbers::pi;
  const int top = count + 2;
  std::vector<std::pair<int, int>> modes;
  for (int m = 1; m <= top; ++m)
    for (int n = 1; n <= top; ++n) modes.emplace_back(m, n);
  std::stable_sort(modes.begin(), modes.end(), [](auto a, auto b) {
    return a.first * a.first + a.second * a.second < b.first * b.first + b.second * b.second;
  });

  ExactSpectrum s;
  int covered = 0;
  for (std::size_t i = 0; i < modes.size() && covered < count;) {
    const int key = modes[i].first * modes[i].first + modes[i].second * modes[i].second;
    ExactCluster c;
    c.eigenvalue = key * pi * pi;
    for (; i < modes.size(); ++i) {
      const auto [m, n] = modes[i];
      if (m * m + n * n != key) break;
      c.functions.push_back([m, n, pi](const Point& x) {
        return 2.0 * std::sin(m * pi * x.x()) * std::sin(n * pi * x.y());
      });
    }
    covered += static_cast<int>(c.functions.size());
    s.clusters_.push_back(std::move(c));
  }
  return s;
}

ExactSpectrum ExactSpectrum::unknown() { return {}; }

int ExactSpectrum::size() const {
  int n = 0;
  for (const auto& c : clusters_) n += static_cast<int>(c.functions.size());
  return n;
}

const ExactCluster& ExactSpectrum::cluster_of(int j) const {
  if (j < 1) throw std::out_of_range("eigenvalue index must be >= 1");
  int seen = 0;
  for (const auto& c : clusters_) {
    seen += static_cast<int>(c.functions.size());
    if (j <= seen) return c;
  }
  throw std::out_of_range("eigenvalue index beyond the tabulated spectrum");
}

double ExactSpectrum::eigenvalue(int j) const { return cluster_of(j).eigenvalue; }

double OrderModel::default_gamma(int k, double epsilon, bool convex) {
  return (k == 1 || !convex) ? 1.0 : 2.0 - epsilon / 2.0;
}

OrderModel OrderModel::make(int k, double epsilon, bool convex, int k2,
                            std::optional<double> gamma) {
  OrderModel m;
  m.k = k;
  m.k2 = k2;
  m.epsilon = epsilon;
  m.gamma = gamma.value_or(default_gamma(k, epsilon, convex));
  return m;
}

double OrderModel::k_bar() const {
  return std::min(2.0 * k - 2.0 * epsilon, k + gamma - epsilon);
}

double OrderModel::k_hat() const {
  return std::min(4.0 * k - 4.0 * epsilon, 2.0 * k + 2.0 * gamma - 2.0 * epsilon);
}

double OrderModel::two_space_eigenvalue() const {
  return std::min(k_hat(), 2.0 * k2 - 2.0 * epsilon);
}

double norm_triple_bar(const AssembledForms& forms, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(forms.A * v)));
}

double norm_b(const AssembledForms& forms, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(forms.B * v)));
}

double norm_V(const WgSpace& space, const Eigen::VectorXd& v) {
  const SparseMatrix m = assemble_v_norm(space);
  return std::sqrt(std::max(0.0, v.dot(m * v)));
}

SparseMatrix norm_matrix(const AssembledForms& forms, ErrorNorm norm) {
  switch (norm) {
    case ErrorNorm::triple_bar: return forms.A;
    case ErrorNorm::b: return forms.B;
    case ErrorNorm::V: return assemble_v_norm(*forms.space);
  }
  throw std::invalid_argument("unknown norm");
}

Eigen::VectorXd unit_sphere_minimizer(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs) {
  const Eigen::Index r = rhs.size();
  if (r == 1) return Eigen::VectorXd::Constant(1, rhs[0] < 0.0 ? -1.0 : 1.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const Eigen::VectorXd d = es.eigenvalues();
  const Eigen::VectorXd b = es.eigenvectors().transpose() * rhs;
  const double scale = std::max(d.cwiseAbs().maxCoeff(), b.norm());
  if (!(scale > 0.0)) return Eigen::VectorXd::Unit(r, 0);

  // Stationary points satisfy (G - mu I) c = g; the minimum has mu <= d_min
  // and |c| = 1, so mu solves sum b_i^2 / (d_i - mu)^2 = 1 on (d_min - |b|, d_min).
  auto length2 = [&](double mu) { return (b.array() / (d.array() - mu)).square().sum(); };
  const double dmin = d[0];
  const double tiny = 1e-14 * scale;
  double lo = dmin - b.norm() - tiny;
  double hi = dmin - tiny;
  if (length2(hi) < 1.0) {
    // Hard case: g has (almost) no component along the lowest eigenvector.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(r);
    for (Eigen::Index i = 1; i < r; ++i) y[i] = b[i] / (d[i] - dmin);
    y[0] = std::sqrt(std::max(0.0, 1.0 - y.squaredNorm()));
    return es.eigenvectors() * y;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * scale; ++it) {
    const double mid = 0.5 * (lo + hi);
    (length2(mid) > 1.0 ? hi : lo) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  const Eigen::VectorXd y = (b.array() / (d.array() - mu)).matrix();
  return es.eigenvectors() * (y / y.norm());
}

double eigenfunction_error(const SparseMatrix& m, const Eigen::VectorXd& computed,
                           const std::vector<Eigen::VectorXd>& projected) {
  const int r = static_cast<int>(projected.size());
  if (r == 0) throw std::invalid_argument("eigenfunction_error: empty cluster");
  Eigen::MatrixXd w(computed.size(), r);
  for (int i = 0; i < r; ++i) w.col(i) = projected[i];
  const Eigen::MatrixXd mw = m * w;
  const Eigen::MatrixXd gram = w.transpose() * mw;
  const Eigen::VectorXd rhs = mw.transpose() * computed;
  const Eigen::VectorXd c = unit_sphere_minimizer(gram, rhs);
  const Eigen::VectorXd diff = w * c - computed;
  return std::sqrt(std::max(0.0, diff.dot(m * diff)));
}

double eigenfunction_error(const AssembledForms& forms, const WeakFunction& computed,
                           const ExactCluster& cluster, ErrorNorm norm) {
  std::vector<Eigen::VectorXd> projected;
  for (const auto& f : cluster.functions)
    projected.push_back(project_Qh(f, forms.space).coefficients());
  return eigenfunction_error(norm_matrix(forms, norm), computed.coefficients(), projected);
}

OrderEstimate observed_order(double e1, double e2, double s1, double s2) {
  OrderEstimate out;
  if (!std::isfinite(e1) || !std::isfinite(e2) || e1 == 0.0 || e2 == 0.0) return out;
  out.sign_flip = (e1 < 0.0) != (e2 < 0.0);
  out.negative = e1 < 0.0 && e2 < 0.0;
  out.value = std::log(std::abs(e1) / std::abs(e2)) / std::log(s1 / s2);
  return out;
}

std::vector<OrderEstimate> observed_orders(const std::vector<double>& errors,
                                           const std::vector<double>& sizes) {
  if (errors.size() != sizes.size())
    throw std::invalid_argument("observed_orders: errors and sizes differ in length");
  std::vector<OrderEstimate> out;
  for (std::size_t i = 1; i < errors.size(); ++i)
    out.push_back(observed_order(errors[i - 1], errors[i], sizes[i - 1], sizes[i]));
  return out;
}

std::vector<bool> lower_bound_report(const ExactSpectrum& exact,
                                     const std::vector<double>& approx) {
  std::vector<bool> out;
  for (std::size_t j = 0; j < approx.size(); ++j)
    out.push_back(exact.eigenvalue(static_cast<int>(j) + 1) - approx[j] >= 0.0);
  return out;
}

std::vector<bool> monotone_increase_report(const std::vector<std::vector<double>>& levels) {
  if (levels.empty()) return {};
  const std::size_t n = levels.front().size();
  std::vector<bool> out(n, true);
  for (std::size_t l = 1; l < levels.size(); ++l) {
    if (levels[l].size() != n) throw std::invalid_argument("levels differ in length");
    for (std::size_t j = 0; j < n; ++j)
      if (!(levels[l][j] > levels[l - 1][j])) out[j] = false;
  }
  return out;
}

Eigen::VectorXd conforming_interpolant(const WeakFunction& v) {
  const Mesh& mesh = v.space().mesh();
  const int nv = mesh.num_vertices();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(nv);
  Eigen::VectorXi count = Eigen::VectorXi::Zero(nv);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int i = 0; i < 3; ++i) {
      const int g = mesh.triangles()[t][i];
      sum[g] += v.interior_value(t, mesh.vertices()[g]);
      ++count[g];
    }
  }
  std::vector<bool> on_boundary(nv, false);
  for (const Edge& e : mesh.edges()) {
    if (!e.boundary()) continue;
    on_boundary[e.vertices[0]] = true;
    on_boundary[e.vertices[1]] = true;
  }
  Eigen::VectorXd out(nv);
  for (int g = 0; g < nv; ++g) out[g] = on_boundary[g] || count[g] == 0 ? 0.0 : sum[g] / count[g];
  return out;
}

namespace {

// Gradient of the linear interpolant of nodal values on triangle t.
Eigen::Vector2d p1_gradient(const Mesh& mesh, const Eigen::VectorXd& nodal, int t) {
  const auto& tri = mesh.triangles()[t];
  const Point a = mesh.vertices()[tri[0]];
  Eigen::Matrix2d d;
  d.row(0) = (mesh.vertices()[tri[1]] - a).transpose();
  d.row(1) = (mesh.vertices()[tri[2]] - a).transpose();
  const Eigen::Vector2d rhs(nodal[tri[1]] - nodal[tri[0]], nodal[tri[2]] - nodal[tri[0]]);
  return d.partialPivLu().solve(rhs);
}

}  // namespace

double p1_seminorm(const Mesh& mesh, const Eigen::VectorXd& nodal) {
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
    s += mesh.area(t) * p1_gradient(mesh, nodal, t).squaredNorm();
  return std::sqrt(s);
}

double interpolant_distance(const WeakFunction& v, const Eigen::VectorXd& nodal) {
  const WgSpace& space = v.space();
  const Mesh& mesh = space.mesh();
  const QuadratureRule& rule = cached_triangle_rule(2 * space.degree());
  double s = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles()[t];
    const double jac = 2.0 * mesh.area(t);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Eigen::Vector2d r = rule.points[q];
      const double pi_v = (1.0 - r.x() - r.y()) * nodal[tri[0]] + r.x() * nodal[tri[1]] +
                          r.y() * nodal[tri[2]];
      const double d = v.interior_value(t, map_to_triangle(mesh, t, r)) - pi_v;
      s += rule.weights[q] * jac * d * d;
    }
  }
  return std::sqrt(s);
}

InterpolantConstants sample_interpolant_constants(std::shared_ptr<const WgSpace> space,
                                                  int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const SparseMatrix vnorm = assemble_v_norm(*space);
  const double h = space->mesh().h();
  InterpolantConstants out;
  for (int i = 0; i < samples; ++i) {
    Eigen::VectorXd c(space->num_dofs());
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = normal(rng);
    const WeakFunction v(space, std::move(c));
    const double nv = std::sqrt(v.coefficients().dot(vnorm * v.coefficients()));
    const Eigen::VectorXd pi_v = conforming_interpolant(v);
    out.stability = std::max(out.stability, p1_seminorm(space->mesh(), pi_v) / nv);
    out.approximation = std::max(out.approximation, interpolant_distance(v, pi_v) / (h * nv));
  }
  return out;
}

}  // namespace wgeig
