#include "dnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/IterativeSolvers>

#include <umfpack.h>

#include "dnls/fem.hpp"

namespace dnls {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/** Marks the sites a half-offset axis pins to zero (mirror outside the
 *  box).  Empty for on-site modes. */
std::vector<char> pinned_sites(const LatticeField& f, const ModeSpec& mode) {
  const int box = f.radius();
  const int ext = f.extent();
  std::vector<char> pinned(f.size(), 0);
  for (int axis = 0; axis < f.dim(); ++axis) {
    for (int i = -box; i <= box; ++i) {
      const int r = mode.reflect_index(axis, i);
      if (r >= -box && r <= box) continue;
      if (f.dim() == 1) {
        pinned[static_cast<std::size_t>(i + box)] = 1;
      } else if (axis == 0) {
        for (int j = 0; j < ext; ++j)
          pinned[static_cast<std::size_t>((i + box) * ext + j)] = 1;
      } else {
        for (int j = 0; j < ext; ++j)
          pinned[static_cast<std::size_t>(j * ext + (i + box))] = 1;
      }
    }
  }
  return pinned;
}

/** Linearization -mesh^-2 Lap - (2p+1)|psi|^2p - lambda as a sparse matrix
 *  over the box sites, optionally bordered by the -psi column/row that
 *  couples the norm constraint to the frequency unknown.  Sites marked
 *  pinned get a decoupled identity row/column: the restricted Newton
 *  system neither moves them nor imposes their equation. */
SpMat linearized_operator(const LatticeField& f, double p, double lambda,
                          bool bordered,
                          const std::vector<char>& pinned = {}) {
  const int box = f.radius();
  const int ext = f.extent();
  const int n = static_cast<int>(f.size());
  const double inv2 = 1.0 / (f.mesh() * f.mesh());
  const double diag_hop = 2.0 * f.dim() * inv2;
  const std::vector<double>& v = f.values();

  auto is_pinned = [&](int k) {
    return !pinned.empty() && pinned[static_cast<std::size_t>(k)] != 0;
  };

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n) * (2 * f.dim() + 1) +
                (bordered ? 2 * static_cast<std::size_t>(n) + 1 : 0));

  auto diag_at = [&](int k) {
    return diag_hop - (2.0 * p + 1.0) * abs_pow_2p(v[k], p) - lambda;
  };
  auto couple = [&](int k, int other) {
    if (!is_pinned(other)) trips.emplace_back(k, other, -inv2);
  };

  if (f.dim() == 1) {
    for (int i = -box; i <= box; ++i) {
      const int k = i + box;
      if (is_pinned(k)) {
        trips.emplace_back(k, k, 1.0);
        continue;
      }
      trips.emplace_back(k, k, diag_at(k));
      if (i > -box) couple(k, k - 1);
      if (i < box) couple(k, k + 1);
    }
  } else {
    for (int i = -box; i <= box; ++i) {
      for (int j = -box; j <= box; ++j) {
        const int k = (i + box) * ext + (j + box);
        if (is_pinned(k)) {
          trips.emplace_back(k, k, 1.0);
          continue;
        }
        trips.emplace_back(k, k, diag_at(k));
        if (i > -box) couple(k, k - ext);
        if (i < box) couple(k, k + ext);
        if (j > -box) couple(k, k - 1);
        if (j < box) couple(k, k + 1);
      }
    }
  }

  const int size = bordered ? n + 1 : n;
  if (bordered) {
    for (int k = 0; k < n; ++k) {
      if (is_pinned(k)) continue;    // psi vanishes there anyway
      trips.emplace_back(k, n, -v[k]);
      trips.emplace_back(n, k, -v[k]);
    }
    trips.emplace_back(n, n, 0.0);
  }

  SpMat m(size, size);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

/** Jacobi preconditioner on |diagonal|; unit weight where the diagonal
 *  vanishes (the border row). */
class AbsDiagonalPreconditioner : public Eigen::DiagonalPreconditioner<double> {
 public:
  AbsDiagonalPreconditioner() = default;
  template <typename MatType>
  AbsDiagonalPreconditioner& analyzePattern(const MatType&) {
    return *this;
  }
  template <typename MatType>
  AbsDiagonalPreconditioner& factorize(const MatType& mat) {
    m_invdiag.resize(mat.cols());
    m_invdiag.setOnes();
    for (int outer = 0; outer < mat.outerSize(); ++outer)
      for (typename MatType::InnerIterator it(mat, outer); it; ++it)
        if (it.row() == it.col() && std::abs(it.value()) > 0.0)
          m_invdiag(it.col()) = 1.0 / std::abs(it.value());
    m_isInitialized = true;
    return *this;
  }
  template <typename MatType>
  AbsDiagonalPreconditioner& compute(const MatType& mat) {
    return factorize(mat);
  }
};

/** LU factorization of a sparse matrix in compressed-column form. */
class UmfpackLu {
 public:
  explicit UmfpackLu(SpMat m) : m_(std::move(m)) {
    m_.makeCompressed();
    const int n = static_cast<int>(m_.rows());
    void* symbolic = nullptr;
    int status =
        umfpack_di_symbolic(n, n, m_.outerIndexPtr(), m_.innerIndexPtr(),
                            m_.valuePtr(), &symbolic, nullptr, nullptr);
    if (status != UMFPACK_OK) {
      if (symbolic) umfpack_di_free_symbolic(&symbolic);
      throw std::runtime_error("sparse factorization failed (symbolic stage)");
    }
    status = umfpack_di_numeric(m_.outerIndexPtr(), m_.innerIndexPtr(),
                                m_.valuePtr(), symbolic, &numeric_, nullptr,
                                nullptr);
    umfpack_di_free_symbolic(&symbolic);
    if (status == UMFPACK_WARNING_singular_matrix)
      throw std::runtime_error(
          "sparse factorization hit a numerically singular matrix");
    if (status != UMFPACK_OK)
      throw std::runtime_error("sparse factorization failed (numeric stage)");
  }
  UmfpackLu(const UmfpackLu&) = delete;
  UmfpackLu& operator=(const UmfpackLu&) = delete;
  ~UmfpackLu() {
    if (numeric_) umfpack_di_free_numeric(&numeric_);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(m_.rows());
    const int status = umfpack_di_solve(
        UMFPACK_A, m_.outerIndexPtr(), m_.innerIndexPtr(), m_.valuePtr(),
        x.data(), b.data(), numeric_, nullptr, nullptr);
    if (status != UMFPACK_OK)
      throw std::runtime_error("sparse triangular solve failed");
    return x;
  }

 private:
  SpMat m_;
  void* numeric_ = nullptr;
};

Eigen::VectorXd solve_newton_system(const SpMat& m, const Eigen::VectorXd& rhs,
                                    double residual_inf, int direct_limit) {
  if (m.rows() <= direct_limit) {
    Eigen::SparseLU<SpMat> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error(
          "singular Newton linearization; restrict the symmetry class or "
          "reduce the mesh size");
    return lu.solve(rhs);
  }
  // Inexact Newton: loose linear tolerance far from the root, tight near it.
  const double eta = residual_inf < 1e-4 ? 1e-6 : 1e-4;
  Eigen::MINRES<SpMat, Eigen::Lower | Eigen::Upper, AbsDiagonalPreconditioner>
      minres;
  minres.setTolerance(eta);
  minres.setMaxIterations(5000);
  minres.compute(m);
  Eigen::VectorXd x = minres.solve(rhs);
  if (minres.info() != Eigen::Success && minres.error() > 1e-3)
    throw std::runtime_error("iterative linear solver stalled on the Newton "
                             "system; reduce the mesh size");
  return x;
}

/** Orthonormal indicator basis of the mode-symmetric subspace.  Sites whose
 *  mirror falls outside the box (the unpaired plane of a half-offset axis)
 *  carry zero in every symmetric field and are excluded.  Column a equals
 *  |orbit_a|^(-1/2) times the sum of the coordinate vectors of orbit a. */
SpMat symmetric_subspace_basis(const LatticeField& f, const ModeSpec& mode) {
  const int box = f.radius();
  const int ext = f.extent();
  const int n = static_cast<int>(f.size());

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(n));
  int orbits = 0;

  auto flat1 = [&](int i) { return i + box; };
  auto flat2 = [&](int i, int j) { return (i + box) * ext + (j + box); };

  if (f.dim() == 1) {
    for (int i = -box; i <= box; ++i) {
      const int r = mode.reflect_index(0, i);
      if (r < -box || r > box) continue;      // forced zero
      const int rep = std::min(i, r);
      if (i != rep) continue;                 // orbit counted at its smallest
      const double w = i == r ? 1.0 : 1.0 / std::sqrt(2.0);
      trips.emplace_back(flat1(i), orbits, w);
      if (i != r) trips.emplace_back(flat1(r), orbits, w);
      ++orbits;
    }
  } else {
    for (int i = -box; i <= box; ++i) {
      const int ri = mode.reflect_index(0, i);
      if (ri < -box || ri > box) continue;
      for (int j = -box; j <= box; ++j) {
        const int rj = mode.reflect_index(1, j);
        if (rj < -box || rj > box) continue;
        int img[4] = {flat2(i, j), flat2(ri, j), flat2(i, rj), flat2(ri, rj)};
        std::sort(img, img + 4);
        if (img[0] != flat2(i, j)) continue;  // not the representative
        const int unique_count =
            static_cast<int>(std::unique(img, img + 4) - img);
        const double w = 1.0 / std::sqrt(double(unique_count));
        for (int k = 0; k < unique_count; ++k)
          trips.emplace_back(img[k], orbits, w);
        ++orbits;
      }
    }
  }

  SpMat basis(n, orbits);
  basis.setFromTriplets(trips.begin(), trips.end());
  basis.makeCompressed();
  return basis;
}

/** Smallest eigenvalue of P H P on {u}^perp, dense path.  The u direction
 *  is deflated upward so it cannot masquerade as the minimum. */
double dense_tangent_margin(const SpMat& h, const Eigen::VectorXd& u) {
  Eigen::MatrixXd m = Eigen::MatrixXd(h);
  const Eigen::Index dim = m.rows();
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j) {
      const double s = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = s;
      m(j, i) = s;
    }
  const Eigen::VectorXd hu = m * u;
  const double uhu = u.dot(hu);
  const double bound = m.cwiseAbs().rowwise().sum().maxCoeff();
  const double lift = 2.0 * bound + 1.0;
  m.noalias() -= u * hu.transpose();
  m.noalias() -= hu * u.transpose();
  m.noalias() += (uhu + lift) * (u * u.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m,
                                                     Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("dense eigensolver failed");
  return eig.eigenvalues()(0);
}

/** Eigenvalue of P H P nearest zero on {u}^perp via shift-invert Lanczos.
 *  The bordered factorization [H, u; u^T, 0] realizes the projected
 *  inverse exactly on the tangent space. */
double lanczos_tangent_margin(const SpMat& h, const Eigen::VectorXd& u) {
  const int dim = static_cast<int>(h.rows());

  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(h.nonZeros()) + 2 * dim + 1);
  for (int outer = 0; outer < h.outerSize(); ++outer)
    for (SpMat::InnerIterator it(h, outer); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()),
                         static_cast<int>(it.col()), it.value());
  for (int k = 0; k < dim; ++k) {
    trips.emplace_back(k, dim, u(k));
    trips.emplace_back(dim, k, u(k));
  }
  trips.emplace_back(dim, dim, 0.0);
  SpMat bordered(dim + 1, dim + 1);
  bordered.setFromTriplets(trips.begin(), trips.end());
  const UmfpackLu lu(std::move(bordered));

  auto tangent = [&](Eigen::VectorXd& v) { v -= u * u.dot(v); };
  auto apply_inverse = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd rhs(dim + 1);
    rhs.head(dim) = q;
    rhs(dim) = 0.0;
    const Eigen::VectorXd full = lu.solve(rhs);
    if (!full.allFinite())
      throw std::runtime_error(
          "shift-invert solve produced non-finite values; the projected "
          "operator is numerically singular");
    Eigen::VectorXd out = full.head(dim);
    tangent(out);
    return out;
  };

  const int max_steps = std::min(60, dim - 1);
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alphas;
  std::vector<double> betas;

  std::mt19937 gen(271828u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd q(dim);
  for (int k = 0; k < dim; ++k) q(k) = gauss(gen);
  tangent(q);
  q.normalize();
  basis.push_back(q);

  for (int step = 0; step < max_steps; ++step) {
    Eigen::VectorXd w = apply_inverse(basis.back());
    const double alpha = basis.back().dot(w);
    alphas.push_back(alpha);
    w -= alpha * basis.back();
    if (step > 0) w -= betas.back() * basis[basis.size() - 2];
    for (int sweep = 0; sweep < 2; ++sweep)
      for (const Eigen::VectorXd& b : basis) w -= b.dot(w) * b;
    const double beta = w.norm();
    if (beta < 1e-13 * std::abs(alphas[0] == 0.0 ? 1.0 : alphas[0]) ||
        beta < 1e-300)
      break;
    betas.push_back(beta);
    basis.push_back(w / beta);
  }

  const int steps = static_cast<int>(alphas.size());
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
  for (int k = 0; k < steps; ++k) {
    tri(k, k) = alphas[static_cast<std::size_t>(k)];
    if (k + 1 < steps) {
      tri(k, k + 1) = betas[static_cast<std::size_t>(k)];
      tri(k + 1, k) = betas[static_cast<std::size_t>(k)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri,
                                                     Eigen::EigenvaluesOnly);
  double theta = 0.0;
  for (int k = 0; k < steps; ++k)
    if (std::abs(eig.eigenvalues()(k)) > std::abs(theta))
      theta = eig.eigenvalues()(k);
  if (theta == 0.0)
    throw std::runtime_error("shift-invert iteration found no spectrum");
  return 1.0 / theta;
}

std::string describe_mu(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", mu);
  return buf;
}

}  // namespace

int auto_radius(const ContinuumProfile& prof, double mesh) {
  if (!(mesh > 0.0)) throw std::invalid_argument("mesh must be positive");
  return static_cast<int>(std::ceil(decay_radius(prof, 1e-12) / mesh));
}

LatticeField initial_guess(const ContinuumProfile& prof, const ModeSpec& mode,
                           double mesh, int radius) {
  LatticeField f = project(prof, mesh, radius, mode);
  f = symmetrize(f, mode);
  const double norm = norm_d(f);
  if (!(norm > 0.0))
    throw std::invalid_argument(
        "profile sample vanishes on this box; cannot normalize the guess");
  const double scale = 1.0 / std::sqrt(norm);
  for (double& v : f.values()) v *= scale;
  return f;
}

LatticeField stationary_residual(const LatticeField& f, double p,
                                 double lambda) {
  const LatticeField lap = discrete_laplacian(f);
  const double inv2 = 1.0 / (f.mesh() * f.mesh());
  LatticeField r = f;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = f.values()[k];
    r.values()[k] =
        -inv2 * lap.values()[k] - abs_pow_2p(v, p) * v - lambda * v;
  }
  return r;
}

double lambda_estimate(const LatticeField& f, double p) {
  const LatticeField lap = discrete_laplacian(f);
  const double inv2 = 1.0 / (f.mesh() * f.mesh());
  LatticeField op = f;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = f.values()[k];
    op.values()[k] = -inv2 * lap.values()[k] - abs_pow_2p(v, p) * v;
  }
  const double denom = dot(f, f);
  if (!(denom > 0.0))
    throw std::invalid_argument("cannot estimate frequency of a zero field");
  return dot(f, op) / denom;
}

BreatherResult solve_breather(const LatticeField& guess, const ModeSpec& mode,
                              double p, double tol, int max_iter) {
  SolverControls controls;
  controls.tol = tol;
  controls.max_iter = max_iter;
  return solve_breather(guess, mode, p, controls);
}

BreatherResult solve_breather(const LatticeField& guess, const ModeSpec& mode,
                              double p, const SolverControls& controls) {
  if (mode.dim != guess.dim())
    throw std::invalid_argument("mode and guess dimension differ");
  if (guess.mesh() >= 1.0)
    throw std::runtime_error(
        "basin failure: mesh 1 or larger is outside the small-mesh "
        "continuation regime");
  if (!(controls.tol > 0.0))
    throw std::invalid_argument("tolerance must be positive");
  if (controls.max_iter < 1)
    throw std::invalid_argument("max_iter must be at least 1");

  LatticeField psi = symmetrize(guess, mode);
  if (sup_norm(psi) == 0.0)
    throw std::invalid_argument("guess is identically zero");

  const int n = static_cast<int>(psi.size());
  const double cell = std::pow(psi.mesh(), psi.dim());
  const std::vector<char> pinned = pinned_sites(psi, mode);
  double lambda = lambda_estimate(psi, p);
  std::vector<double> history;

  for (int iter = 0; iter <= controls.max_iter; ++iter) {
    const LatticeField residual = stationary_residual(psi, p, lambda);
    const double rinf = restricted_sup_norm(residual, mode);
    const double constraint = norm_d(psi) - 1.0;
    history.push_back(rinf);

    if (rinf <= controls.tol && std::abs(constraint) <= controls.tol) {
      BreatherResult out{psi, mode, p, lambda, rinf, iter, std::nullopt};
      return out;
    }
    if (iter == controls.max_iter) break;

    const SpMat jac = linearized_operator(psi, p, lambda, true, pinned);
    Eigen::VectorXd rhs(n + 1);
    for (int k = 0; k < n; ++k)
      rhs(k) = pinned[static_cast<std::size_t>(k)]
                   ? 0.0
                   : -residual.values()[static_cast<std::size_t>(k)];
    rhs(n) = constraint / (2.0 * cell);

    const Eigen::VectorXd step =
        solve_newton_system(jac, rhs, rinf, controls.direct_limit);
    if (!step.allFinite())
      throw std::runtime_error(
          "singular Newton linearization; restrict the symmetry class or "
          "reduce the mesh size");

    for (int k = 0; k < n; ++k)
      psi.values()[static_cast<std::size_t>(k)] += step(k);
    psi = symmetrize(psi, mode);
    lambda += step(n);
  }

  std::string msg = "no convergence within the iteration budget; residual "
                    "history:";
  for (double r : history) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %.3e", r);
    msg += buf;
  }
  throw std::runtime_error(msg);
}

double coercivity_check(const BreatherResult& res, bool restrict_to_mode,
                        int dense_limit) {
  const LatticeField& psi = res.field;
  const double factor = 2.0 * std::pow(psi.mesh(), psi.dim());

  SpMat hessian = linearized_operator(psi, res.p, res.lambda, false);
  hessian *= factor;

  const Eigen::Map<const Eigen::VectorXd> psivec(
      psi.values().data(), static_cast<Eigen::Index>(psi.size()));

  SpMat reduced;
  Eigen::VectorXd anchor;
  if (restrict_to_mode) {
    const SpMat basis = symmetric_subspace_basis(psi, res.mode);
    const SpMat half = hessian * basis;
    reduced = SpMat(basis.transpose() * half);
    SpMat reduced_t = SpMat(reduced.transpose());
    reduced = 0.5 * (reduced + reduced_t);
    anchor = basis.transpose() * psivec;
  } else {
    reduced = std::move(hessian);
    anchor = psivec;
  }

  const double norm = anchor.norm();
  if (!(norm > 0.0))
    throw std::invalid_argument("cannot certify coercivity about zero");
  anchor /= norm;

  if (reduced.rows() <= dense_limit)
    return dense_tangent_margin(reduced, anchor);
  return lanczos_tangent_margin(reduced, anchor);
}

std::pair<double, double> sup_bound_check(const LatticeField& f) {
  const double rhs =
      2.0 * std::pow(f.mesh(), 0.5 - 0.5 * f.dim()) * qmu_norm(f);
  return {sup_norm(f), rhs};
}

MuFreeForm rescale_to_mu_free(const BreatherResult& res) {
  const double mesh = res.field.mesh();
  const double scale = std::pow(mesh, 1.0 / res.p);
  LatticeField phi(res.field.dim(), 1.0, res.field.radius());
  for (std::size_t k = 0; k < phi.size(); ++k)
    phi.values()[k] = scale * res.field.values()[k];
  const double lambda_tilde = mesh * mesh * res.lambda;
  const double mass_target = std::pow(mesh, 2.0 / res.p - res.field.dim());
  return {std::move(phi), lambda_tilde, mass_target};
}

ConvergenceReport convergence_study(const ModeSpec& mode, double p,
                                    const std::vector<double>& mus,
                                    double tol) {
  if (mus.size() < 3)
    throw std::invalid_argument("a convergence study needs at least three "
                                "mesh sizes");
  std::vector<double> ladder = mus;
  std::sort(ladder.begin(), ladder.end(), std::greater<double>());
  for (std::size_t k = 0; k < ladder.size(); ++k) {
    if (!(ladder[k] > 0.0 && ladder[k] < 1.0))
      throw std::invalid_argument("mesh sizes must lie in (0, 1)");
    if (k > 0 && ladder[k] == ladder[k - 1])
      throw std::invalid_argument("mesh sizes must be distinct");
  }

  const ContinuumProfile prof = unit_ground_state(mode.dim, p);

  ConvergenceReport report;
  report.dim = mode.dim;
  report.mode = mode.name();
  report.p = p;
  report.tol = tol;
  report.lambda_c = prof.lambda_c;

  std::vector<double> ok_mu;
  std::vector<double> ok_qmu;
  std::vector<double> ok_sup;
  for (double mu : ladder) {
    try {
      const int box = auto_radius(prof, mu);
      const LatticeField guess = initial_guess(prof, mode, mu, box);
      const BreatherResult res = solve_breather(guess, mode, p, tol);
      const LatticeField raw = project(prof, mu, box, mode);
      LatticeField diff = res.field;
      for (std::size_t k = 0; k < diff.size(); ++k)
        diff.values()[k] -= raw.values()[k];
      ConvergenceRow row;
      row.mu = mu;
      row.radius = box;
      row.qmu_error = qmu_norm(diff);
      row.sup_error = sup_norm(diff);
      row.lambda = res.lambda;
      row.iterations = res.iterations;
      report.rows.push_back(row);
      ok_mu.push_back(mu);
      ok_qmu.push_back(row.qmu_error);
      ok_sup.push_back(row.sup_error);
    } catch (const std::exception& e) {
      report.partial = true;
      report.errors.push_back("mu=" + describe_mu(mu) + ": " + e.what());
    }
  }

  if (ok_mu.size() >= 2) {
    report.qmu_order = fit_log_slope(ok_mu, ok_qmu);
    report.sup_order = fit_log_slope(ok_mu, ok_sup);
  } else {
    report.qmu_order = std::numeric_limits<double>::quiet_NaN();
    report.sup_order = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

double fit_log_slope(const std::vector<double>& xs,
                     const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("slope fit needs matching lists of at least "
                                "two points");
  const std::size_t count = xs.size();
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    if (!(xs[k] > 0.0) || !(ys[k] > 0.0))
      throw std::invalid_argument("slope fit needs positive data");
    const double lx = std::log(xs[k]);
    const double ly = std::log(ys[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = count * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("slope fit is degenerate");
  return (count * sxy - sx * sy) / denom;
}

}  // namespace dnls
