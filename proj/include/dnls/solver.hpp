#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnls/continuum.hpp"
#include "dnls/lattice.hpp"

namespace dnls {

/** Converged stationary state: lambda * psi = -mesh^-2 Laplacian psi
 *  - |psi|^2p psi on the box, with norm_d(psi) = 1.  residual_inf is the
 *  max-norm of that equation over the sites the symmetry class leaves
 *  free (restricted_sup_norm); pinned planes of half-offset axes act as
 *  boundary sites, where the equation is not imposed. */
struct BreatherResult {
  LatticeField field;
  ModeSpec mode;
  double p = 1.0;
  double lambda = 0.0;
  double residual_inf = 0.0;
  int iterations = 0;
  std::optional<double> coercivity_margin;
};

/** Box radius so the profile tail below 1e-12 of peak fits the box. */
int auto_radius(const ContinuumProfile& prof, double mesh);

/** Nodal sample of the profile on the mode-offset grid, scaled so
 *  norm_d = 1 exactly.  Throws if the sample vanishes identically. */
LatticeField initial_guess(const ContinuumProfile& prof, const ModeSpec& mode,
                           double mesh, int radius);

/** R = -mesh^-2 Laplacian psi - |psi|^2p psi - lambda psi. */
LatticeField stationary_residual(const LatticeField& f, double p,
                                 double lambda);

/** Rayleigh estimate <psi, -mesh^-2 Lap psi - |psi|^2p psi> / <psi,psi>. */
double lambda_estimate(const LatticeField& f, double p);

/** Internal tuning knobs; the defaults implement the documented behavior. */
struct SolverControls {
  double tol = 1e-12;
  int max_iter = 50;
  // Bordered systems up to this many unknowns use a direct factorization;
  // larger ones use preconditioned MINRES.
  int direct_limit = 100000;
};

/** Constrained Newton iteration for the stationary state, keeping the
 *  symmetry class of `mode` and the norm constraint.  Throws on mesh >= 1,
 *  an identically zero guess, a singular linearization, or running out of
 *  iterations (the message then carries the residual history). */
BreatherResult solve_breather(const LatticeField& guess, const ModeSpec& mode,
                              double p, double tol = 1e-12, int max_iter = 50);
BreatherResult solve_breather(const LatticeField& guess, const ModeSpec& mode,
                              double p, const SolverControls& controls);

/** Smallest eigenvalue of the second variation 2 mesh^dim (-mesh^-2 Lap
 *  - (2p+1)|psi|^2p - lambda) restricted to the symmetry class of the
 *  result (or the full space with restrict_to_mode = false), projected on
 *  the tangent space {<psi, h> = 0}.  Positive margin certifies local
 *  coercivity.  Reduced problems up to dense_limit use a dense
 *  eigensolver; larger ones use shift-invert Lanczos about zero, which
 *  reports the eigenvalue nearest zero. */
double coercivity_check(const BreatherResult& res, bool restrict_to_mode = true,
                        int dense_limit = 5000);

/** {sup norm, 2 mesh^(1/2 - dim/2) qmu_norm}; first <= second always. */
std::pair<double, double> sup_bound_check(const LatticeField& f);

/** Mesh-free normal form phi = mesh^(1/p) psi on a unit-mesh lattice. */
struct MuFreeForm {
  LatticeField phi;       // mesh 1
  double lambda_tilde;    // mesh^2 lambda
  double mass_target;     // mesh^(2/p - dim), equals sum phi^2
};
MuFreeForm rescale_to_mu_free(const BreatherResult& res);

struct ConvergenceRow {
  double mu = 0.0;
  int radius = 0;
  double qmu_error = 0.0;
  double sup_error = 0.0;
  double lambda = 0.0;
  int iterations = 0;
};

struct ConvergenceReport {
  int dim = 1;
  std::string mode;
  double p = 1.0;
  double tol = 0.0;
  double lambda_c = 0.0;
  std::vector<ConvergenceRow> rows;   // decreasing mu
  double qmu_order = 0.0;             // least-squares slope in log-log
  double sup_order = 0.0;
  bool partial = false;               // some mesh sizes failed
  std::vector<std::string> errors;
};

/** Solve along a mesh ladder (at least three sizes, each in (0,1)) and
 *  compare against the raw profile sample on the same box.  A failure at
 *  one mesh size marks the report partial and the ladder continues. */
ConvergenceReport convergence_study(const ModeSpec& mode, double p,
                                    const std::vector<double>& mus,
                                    double tol = 1e-12);

/** Least-squares slope of log(y) against log(x). */
double fit_log_slope(const std::vector<double>& xs,
                     const std::vector<double>& ys);

}  // namespace dnls
