#include "wgeig/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#ifdef WGEIG_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#endif

namespace wgeig {

// ---------------------------------------------------------------------------
// SparseCholesky

struct SparseCholesky::Impl {
#ifdef WGEIG_HAVE_CHOLMOD
  Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
#else
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
#endif
};

SparseCholesky::SparseCholesky(const SparseMatrix& m)
    : impl_(std::make_unique<Impl>()), rows_(static_cast<int>(m.rows())) {
  if (m.rows() != m.cols()) throw FactorizationError("sparse Cholesky: matrix is not square");
  impl_->llt.compute(m);
  if (impl_->llt.info() != Eigen::Success) {
    throw FactorizationError("sparse Cholesky failed: matrix is not positive definite");
  }
}

SparseCholesky::~SparseCholesky() = default;

Eigen::MatrixXd SparseCholesky::solve(const Eigen::MatrixXd& rhs) const {
  if (rows_ == 0) return Eigen::MatrixXd(0, rhs.cols());
  Eigen::MatrixXd x = impl_->llt.solve(rhs);
  return x;
}

// ---------------------------------------------------------------------------
// Block helpers

namespace {

struct Blocks {
  SparseMatrix a00, a0b, ab0, abb;
};

Blocks split_blocks(const SparseMatrix& a, int n0) {
  const int n = static_cast<int>(a.rows());
  const int nb = n - n0;
  std::vector<Eigen::Triplet<double>> t00, t0b, tb0, tbb;
  for (int j = 0; j < a.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      const int i = static_cast<int>(it.row());
      if (i < n0 && j < n0) t00.emplace_back(i, j, it.value());
      else if (i < n0) t0b.emplace_back(i, j - n0, it.value());
      else if (j < n0) tb0.emplace_back(i - n0, j, it.value());
      else tbb.emplace_back(i - n0, j - n0, it.value());
    }
  }
  Blocks b;
  b.a00.resize(n0, n0);
  b.a0b.resize(n0, nb);
  b.ab0.resize(nb, n0);
  b.abb.resize(nb, nb);
  b.a00.setFromTriplets(t00.begin(), t00.end());
  b.a0b.setFromTriplets(t0b.begin(), t0b.end());
  b.ab0.setFromTriplets(tb0.begin(), tb0.end());
  b.abb.setFromTriplets(tbb.begin(), tbb.end());
  return b;
}

// Inverse of a block diagonal matrix with square blocks of the given size.
SparseMatrix block_diagonal_inverse(const SparseMatrix& a00, int block) {
  const int n0 = static_cast<int>(a00.rows());
  if (n0 % block != 0) throw std::invalid_argument("interior size is not a multiple of block size");
  const int nblocks = n0 / block;
  std::vector<Eigen::MatrixXd> dense(nblocks, Eigen::MatrixXd::Zero(block, block));
  for (int j = 0; j < a00.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(a00, j); it; ++it) {
      const int i = static_cast<int>(it.row());
      if (i / block != j / block) {
        throw std::invalid_argument("interior block of the matrix is not block diagonal");
      }
      dense[j / block](i % block, j % block) = it.value();
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nblocks) * block * block);
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(block, block);
  for (int b = 0; b < nblocks; ++b) {
    Eigen::LLT<Eigen::MatrixXd> llt(dense[b]);
    if (llt.info() != Eigen::Success) {
      throw FactorizationError("interior block " + std::to_string(b) + " is not positive definite");
    }
    Eigen::MatrixXd inv = llt.solve(identity);
    inv = 0.5 * (inv + inv.transpose()).eval();
    for (int c = 0; c < block; ++c)
      for (int r = 0; r < block; ++r) trip.emplace_back(b * block + r, b * block + c, inv(r, c));
  }
  SparseMatrix d(n0, n0);
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v, int n0) {
  Eigen::Index imax = 0;
  v.head(n0).cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
}

}  // namespace

double norm_inf(const SparseMatrix& m) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(m.rows());
  for (int j = 0; j < m.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) rows[it.row()] += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

std::vector<int> cluster_ids(const std::vector<double>& values, double relative_gap) {
  std::vector<int> ids(values.size(), 0);
  int current = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double scale = std::max(std::abs(values[i]), std::abs(values[i - 1]));
    if (std::abs(values[i] - values[i - 1]) > relative_gap * scale) ++current;
    ids[i] = current;
  }
  return ids;
}

// ---------------------------------------------------------------------------
// SpdSystemSolver

SpdSystemSolver::SpdSystemSolver(const SparseMatrix& A, int n0, int block)
    : n_(static_cast<int>(A.rows())), n0_(block > 0 ? n0 : 0), block_(block) {
  if (A.rows() != A.cols()) throw std::invalid_argument("system matrix is not square");
  if (block_ <= 0) {
    factor_ = std::make_unique<SparseCholesky>(A);
    return;
  }
  if (n0_ < 0 || n0_ > n_) throw std::invalid_argument("interior size out of range");
  Blocks b = split_blocks(A, n0_);
  interior_inverse_ = block_diagonal_inverse(b.a00, block_);
  coupling_0b_ = std::move(b.a0b);
  coupling_b0_ = std::move(b.ab0);
  if (n_ > n0_) {
    SparseMatrix tmp = coupling_b0_ * interior_inverse_;
    SparseMatrix schur = b.abb - tmp * coupling_0b_;
    factor_ = std::make_unique<SparseCholesky>(schur);
  }
}

SpdSystemSolver::~SpdSystemSolver() = default;

Eigen::MatrixXd SpdSystemSolver::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != n_) throw std::invalid_argument("right-hand side has wrong length");
  if (block_ <= 0) return factor_->solve(rhs);
  const int nb = n_ - n0_;
  Eigen::MatrixXd x(n_, rhs.cols());
  const Eigen::MatrixXd y0 = interior_inverse_ * rhs.topRows(n0_);
  if (nb == 0) return y0;
  const Eigen::MatrixXd rb = rhs.bottomRows(nb) - coupling_b0_ * y0;
  x.bottomRows(nb) = factor_->solve(rb);
  x.topRows(n0_) = interior_inverse_ * (rhs.topRows(n0_) - coupling_0b_ * x.bottomRows(nb));
  return x;
}

Eigen::VectorXd SpdSystemSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::MatrixXd x = solve(Eigen::MatrixXd(rhs));
  return x.col(0);
}

std::shared_ptr<const SpdSystemSolver> make_system_solver(const AssembledForms& forms) {
  return std::make_shared<SpdSystemSolver>(forms.A, forms.space->num_interior_dofs(),
                                           forms.space->interior_dofs_per_element());
}

Eigen::VectorXd checked_solve(const SpdSystemSolver& solver, const SparseMatrix& A,
                              const Eigen::VectorXd& rhs, double tol) {
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd x = solver.solve(rhs);
  Eigen::VectorXd r = rhs - A * x;
  for (int sweep = 0; sweep < 3 && r.norm() > tol * bnorm; ++sweep) {
    x += solver.solve(r);
    r = rhs - A * x;
  }
  if (r.norm() > tol * bnorm) {
    throw ConvergenceError("linear solve residual " + std::to_string(r.norm() / bnorm) +
                               " exceeds tolerance",
                           {r.norm()});
  }
  return x;
}

Eigen::VectorXd linear_solve(const SparseMatrix& A, const Eigen::VectorXd& rhs, double tol) {
  SpdSystemSolver solver(A, 0, 0);
  return checked_solve(solver, A, rhs, tol);
}

// ---------------------------------------------------------------------------
// CondensedPencil

CondensedPencil::CondensedPencil(const SparseMatrix& A, const SparseMatrix& B, int n0, int block)
    : A_(A), n0_(n0) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("pencil matrices have different sizes");
  }
  if (n0 < 1 || n0 > A.rows()) throw std::invalid_argument("interior size out of range");
  Blocks bb = split_blocks(B, n0);
  if (bb.a0b.nonZeros() + bb.ab0.nonZeros() + bb.abb.nonZeros() > 0) {
    for (const SparseMatrix* m : {&bb.a0b, &bb.ab0, &bb.abb}) {
      for (int j = 0; j < m->outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(*m, j); it; ++it)
          if (it.value() != 0.0) {
            throw std::invalid_argument("mass matrix has entries outside the interior block");
          }
    }
  }
  M0_ = std::move(bb.a00);
  Blocks ab = split_blocks(A, n0);
  A00_ = std::move(ab.a00);
  A0b_ = std::move(ab.a0b);
  Ab0_ = std::move(ab.ab0);
  Abb_ = std::move(ab.abb);
  solver_ = std::make_shared<SpdSystemSolver>(A, n0, block);
}

CondensedPencil::CondensedPencil(const AssembledForms& forms)
    : CondensedPencil(forms.A, forms.B, forms.space->num_interior_dofs(),
                      forms.space->interior_dofs_per_element()) {}

const SparseCholesky& CondensedPencil::edge_factor() const {
  std::call_once(edge_once_, [this] {
    if (Abb_.rows() > 0) edge_factor_ = std::make_unique<SparseCholesky>(Abb_);
  });
  return *edge_factor_;
}

Eigen::MatrixXd CondensedPencil::solve_full(const Eigen::MatrixXd& rhs0) const {
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(full_size(), rhs0.cols());
  rhs.topRows(n0_) = rhs0;
  return solver_->solve(rhs);
}

Eigen::MatrixXd CondensedPencil::apply_S_inverse(const Eigen::MatrixXd& y0) const {
  return solve_full(y0).topRows(n0_);
}

Eigen::MatrixXd CondensedPencil::apply_S(const Eigen::MatrixXd& x0) const {
  Eigen::MatrixXd y = A00_ * x0;
  if (Abb_.rows() > 0) {
    const Eigen::MatrixXd t = Ab0_ * x0;
    y -= A0b_ * edge_factor().solve(t);
  }
  return y;
}

Eigen::VectorXd CondensedPencil::recover(const Eigen::VectorXd& u0) const {
  Eigen::VectorXd u(full_size());
  u.head(n0_) = u0;
  if (Abb_.rows() > 0) {
    const Eigen::MatrixXd t = Ab0_ * u0;
    u.tail(Abb_.rows()) = -edge_factor().solve(t).col(0);
  }
  return u;
}

Eigen::MatrixXd CondensedPencil::dense_S() const {
  Eigen::MatrixXd s = apply_S(Eigen::MatrixXd::Identity(n0_, n0_));
  return 0.5 * (s + s.transpose());
}

// ---------------------------------------------------------------------------
// Eigensolvers

namespace {

Eigenpairs dense_oracle(const SparseMatrix& A, const SparseMatrix& B, int n0, int nev) {
  const Eigen::MatrixXd a(A);
  const Eigen::MatrixXd b(B);
  // B x = mu A x with A SPD; finite eigenvalues lambda = 1/mu, mu > 0.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(b, a);
  if (ges.info() != Eigen::Success) throw FactorizationError("dense oracle failed");
  const Eigen::VectorXd& mu = ges.eigenvalues();
  const double mu_max = mu.size() ? mu.maxCoeff() : 0.0;
  Eigenpairs out;
  out.values.resize(nev);
  out.vectors.resize(A.rows(), nev);
  int found = 0;
  for (Eigen::Index i = mu.size() - 1; i >= 0 && found < nev; --i) {
    if (mu[i] <= mu_max * 1e-13) break;
    out.values[found] = 1.0 / mu[i];
    out.vectors.col(found) = ges.eigenvectors().col(i) / std::sqrt(mu[i]);
    ++found;
  }
  if (found < nev) {
    throw std::invalid_argument("requested more eigenpairs than the finite spectrum holds");
  }
  for (int j = 0; j < nev; ++j) fix_sign(out.vectors.col(j), n0);
  return out;
}

Eigenpairs condensed_dense(const SparseMatrix& A, const SparseMatrix& B, int n0, int block,
                           int nev) {
  const CondensedPencil pencil(A, B, n0, block);
  const Eigen::MatrixXd s = pencil.dense_S();
  const Eigen::MatrixXd m0(pencil.interior_mass());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(s, m0);
  if (ges.info() != Eigen::Success) throw FactorizationError("condensed dense eigensolver failed");
  Eigenpairs out;
  out.iterations = 1;
  out.values = ges.eigenvalues().head(nev);
  out.vectors.resize(A.rows(), nev);
  for (int j = 0; j < nev; ++j) out.vectors.col(j) = pencil.recover(ges.eigenvectors().col(j));
  for (int j = 0; j < nev; ++j) fix_sign(out.vectors.col(j), n0);
  return out;
}

// Columns of y made M0-orthogonal to v and to each other; directions that
// are numerically dependent are dropped.
Eigen::MatrixXd orthogonal_extension(const Eigen::MatrixXd& v, Eigen::MatrixXd y,
                                     const SparseMatrix& m) {
  for (int pass = 0; pass < 2; ++pass) {
    if (v.cols() > 0) y -= v * (v.transpose() * (m * y));
  }
  Eigen::MatrixXd g = y.transpose() * (m * y);
  g = 0.5 * (g + g.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const Eigen::VectorXd& d = es.eigenvalues();
  const double dmax = d.size() ? d.maxCoeff() : 0.0;
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] > 1e-20 * std::max(dmax, 1.0) && d[i] > 1e-12 * dmax) keep.push_back(static_cast<int>(i));
  Eigen::MatrixXd out(y.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    out.col(j) = y * es.eigenvectors().col(keep[j]) / std::sqrt(d[keep[j]]);
  // One more pass against v for stability.
  if (v.cols() > 0 && out.cols() > 0) out -= v * (v.transpose() * (m * out));
  if (out.cols() > 0) {
    Eigen::MatrixXd h = out.transpose() * (m * out);
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (h + h.transpose()));
    if (llt.info() == Eigen::Success) out = llt.matrixU().solve<Eigen::OnTheRight>(out);
  }
  return out;
}

// Restarted block Krylov Rayleigh-Ritz for T = S^{-1} M0 (shift-invert at
// zero). Each cycle spans [X, T X, ..., T^{m-1} X] and restarts from the
// leading Ritz vectors.
Eigenpairs subspace_iteration(const SparseMatrix& A, const SparseMatrix& B, int n0, int block,
                              int nev, const EigenOptions& opt) {
  constexpr int kBlocks = 3;
  const CondensedPencil pencil(A, B, n0, block);
  const SparseMatrix& m0 = pencil.interior_mass();
  int p = opt.subspace_size > 0 ? opt.subspace_size : std::max(2 * nev, nev + 8);
  p = std::min(std::max(p, nev), n0);

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x(n0, p);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = normal(rng);
  x = orthogonal_extension(Eigen::MatrixXd(n0, 0), x, m0);
  if (x.cols() < nev) throw ConvergenceError("starting block lost rank", {});

  const double anorm = norm_inf(A);
  const double threshold = opt.tol * anorm;
  Eigenpairs out;
  std::vector<double> res(nev, 0.0);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    // Basis V with V^T M0 V = I, and the full solutions W of A W = [M0 V; 0].
    Eigen::MatrixXd v = x;
    Eigen::MatrixXd w = pencil.solve_full(m0 * x);
    Eigen::MatrixXd last = w.topRows(n0);
    for (int b = 1; b < kBlocks && v.cols() < n0; ++b) {
      const Eigen::MatrixXd y = orthogonal_extension(v, last, m0);
      if (y.cols() == 0) break;
      const Eigen::MatrixXd wy = pencil.solve_full(m0 * y);
      Eigen::MatrixXd vn(n0, v.cols() + y.cols());
      vn << v, y;
      Eigen::MatrixXd wn(w.rows(), w.cols() + wy.cols());
      wn << w, wy;
      v = std::move(vn);
      w = std::move(wn);
      last = wy.topRows(n0);
    }
    const Eigen::MatrixXd tv = w.topRows(n0);
    const Eigen::MatrixXd mtv = m0 * tv;
    Eigen::MatrixXd h = v.transpose() * mtv;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
    if (ritz.info() != Eigen::Success) throw ConvergenceError("Rayleigh-Ritz step failed", res);
    const Eigen::Index nb = h.rows();
    if (nb < nev) throw ConvergenceError("Krylov basis smaller than the requested count", res);
    // Largest theta of T first; lambda = 1 / theta.
    Eigen::MatrixXd c(nb, nb);
    Eigen::VectorXd lambda(nb);
    for (Eigen::Index j = 0; j < nb; ++j) {
      c.col(j) = ritz.eigenvectors().col(nb - 1 - j);
      lambda[j] = 1.0 / ritz.eigenvalues()[nb - 1 - j];
    }
    const Eigen::MatrixXd cn = c.leftCols(nev);
    const Eigen::MatrixXd r = m0 * (v * cn) - mtv * cn * lambda.head(nev).asDiagonal();
    bool converged = true;
    for (int j = 0; j < nev; ++j) {
      res[j] = r.col(j).norm();
      converged = converged && res[j] <= threshold;
    }
    if (converged) {
      out.iterations = it;
      out.values = lambda.head(nev);
      out.vectors = w * cn;
      for (int j = 0; j < nev; ++j) {
        const Eigen::VectorXd u0 = out.vectors.col(j).head(n0);
        out.vectors.col(j) /= std::sqrt(u0.dot(m0 * u0));
      }
      break;
    }
    x = v * c.leftCols(std::min<Eigen::Index>(p, nb));
  }
  if (out.iterations == 0) {
    std::ostringstream msg;
    msg << "eigensolver did not converge in " << opt.max_iterations << " iterations; residuals";
    for (double r : res) msg << ' ' << r;
    throw ConvergenceError(msg.str(), res);
  }
  for (int j = 0; j < nev; ++j) fix_sign(out.vectors.col(j), n0);
  return out;
}

}  // namespace

Eigenpairs eigensolve_pencil(const SparseMatrix& A, const SparseMatrix& B, int n0, int block,
                             int nev, const EigenOptions& options) {
  if (nev < 1) throw std::invalid_argument("nev must be >= 1");
  if (nev > n0) {
    throw std::invalid_argument("nev=" + std::to_string(nev) +
                                " exceeds the finite spectrum size " + std::to_string(n0));
  }
  Eigenpairs pairs = options.mode == EigenMode::dense_oracle
                         ? dense_oracle(A, B, n0, nev)
                         : n0 <= options.dense_limit
                         ? condensed_dense(A, B, n0, block, nev)
                         : subspace_iteration(A, B, n0, block, nev, options);
  pairs.residuals.resize(nev);
  for (int j = 0; j < nev; ++j) {
    const Eigen::VectorXd u = pairs.vectors.col(j);
    pairs.residuals[j] = (A * u - pairs.values[j] * (B * u)).norm();
  }
  return pairs;
}

EigenResult eigensolve(const AssembledForms& forms, int nev, const EigenOptions& options) {
  const WgSpace& space = *forms.space;
  Eigenpairs pairs = eigensolve_pencil(forms.A, forms.B, space.num_interior_dofs(),
                                       space.interior_dofs_per_element(), nev, options);
  EigenResult result;
  result.iterations = pairs.iterations;
  result.norm_estimate = norm_inf(forms.A);
  result.residuals = pairs.residuals;
  for (int j = 0; j < nev; ++j) {
    result.eigenvalues.push_back(pairs.values[j]);
    result.eigenvectors.emplace_back(forms.space, pairs.vectors.col(j));
  }
  result.cluster = cluster_ids(result.eigenvalues, options.cluster_gap);
  return result;
}

}  // namespace wgeig
