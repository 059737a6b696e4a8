#pragma once

#include <vector>

namespace dnls {

/** Radial ground-state profile of the focusing continuum equation
 *  lambda psi = -Laplace psi - |psi|^(2p) psi, stored as dense tables of
 *  psi and dpsi/dr on the uniform grid r_k = k*step, step = 0.001/decay_rate,
 *  up to r_max = 40/decay_rate. Beyond switch_radius (where psi falls to
 *  1e-6 of the amplitude) evaluation uses the analytic linearized tail:
 *  C exp(-kappa r) in 1D, C K0(kappa r) in 2D; table nodes past the switch
 *  hold tail values, so tables and evaluation agree everywhere. */
struct ContinuumProfile {
  int dim;
  double p;
  double lambda_c;     // negative
  double amplitude;    // psi(0)
  double decay_rate;   // kappa = sqrt(-lambda_c)
  double step;
  std::vector<double> values;
  std::vector<double> derivs;
  double switch_radius;
  double tail_coeff;

  double r_max() const { return step * static_cast<double>(values.size() - 1); }
  /** psi(|r|); cubic interpolation on the table, analytic tail beyond the
   *  switch radius. */
  double value(double r) const;
  /** dpsi/dr at |r| (an odd function of r; the signed value for r >= 0). */
  double derivative(double r) const;
};

/** The closed-form 1D cubic ground state psi(x) = (1/sqrt 2) sech(x/2),
 *  eigenvalue -1/4, mass 2. */
ContinuumProfile explicit_ground_state_1d();

/** Positive decaying radial solution of
 *  psi'' + ((dim-1)/r) psi' + |psi|^(2p) psi + lambda psi = 0, psi'(0) = 0,
 *  found by bisection on psi(0) between overshoot (psi crosses zero) and
 *  undershoot (psi turns back up). Requires 1/2 <= p < 2/dim, lambda < 0. */
ContinuumProfile shoot_radial_ground_state(int dim, double p, double lambda);

/** Member of the scaling family psi_s(z) = s^(1/p) psi(sz), lambda -> s^2
 *  lambda, with s chosen so the continuum mass becomes 1. Exact table
 *  transform: the grid convention step = 0.001/kappa maps nodes one-to-one. */
ContinuumProfile rescale_to_unit_mass(const ContinuumProfile& prof);

/** Unit-mass ground state: the explicit profile rescaled for dim=1 p=1,
 *  otherwise shoot at lambda = -1 and rescale. */
ContinuumProfile unit_ground_state(int dim, double p);

struct ContinuumFunctionals {
  double mass;             // integral of psi^2
  double gradient_energy;  // integral of |grad psi|^2
  double potential;        // integral of |psi|^(2p+2)
  double hamiltonian;      // gradient_energy - potential/(p+1)
  double quad_error;       // max step-halving discrepancy across the integrals
};

/** Composite-Simpson radial quadrature (Jacobian 2 pi r in 2D, factor 2 for
 *  the two half-lines in 1D), with a step-halving error estimate. */
ContinuumFunctionals continuum_functionals(const ContinuumProfile& prof,
                                           double p);

/** Max over stored radii of the equation residual, with the second
 *  derivative taken by finite differences of the derivative table; stencils
 *  straddling the tail switch are skipped. */
double ode_residual_max(const ContinuumProfile& prof, double p);

/** Max mismatch between the derivative table and finite differences of the
 *  value table; ties the two tables together. */
double deriv_consistency_max(const ContinuumProfile& prof);

/** Smallest radius where psi falls to level*amplitude (level < 1). */
double decay_radius(const ContinuumProfile& prof, double level);

}  // namespace dnls
