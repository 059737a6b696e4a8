#pragma once

#include <array>
#include <functional>

#include "dnls/continuum.hpp"
#include "dnls/lattice.hpp"

namespace dnls {

/** Continuous piecewise-linear interpolant of a lattice field: hat functions
 *  on mesh cells in 1D; in 2D each cell [j,j+1]x[k,k+1] splits along the
 *  anti-diagonal from (j+1,k) to (j,k+1) into a lower-left and an upper-right
 *  triangle (points on the diagonal count as lower-left). The basis may be
 *  shifted by half a cell per axis (half-offset breather centers); the field
 *  extends by zero outside the lattice box, so the interpolant decays to zero
 *  across one ghost cell. */
struct FemFunction {
  LatticeField base;
  std::array<double, 2> offset;  // per-axis shift in units of the mesh

  FemFunction(LatticeField b, std::array<double, 2> off);
  FemFunction(LatticeField b, const ModeSpec& mode);

  double evaluate(double x) const;
  double evaluate(double x, double y) const;
};

/** Exact Dirichlet energy of the interpolant, via the bond sums it reduces
 *  to: (1/mu) sum (dpsi)^2 in 1D, the plain bond sum in 2D (mesh factors
 *  cancel at n = 2). */
double gradient_energy(const FemFunction& f);

struct GradientIntegrals {
  double xx;  // integral of Psi_x^2
  double yy;  // integral of Psi_y^2 (zero in 1D)
  double xy;  // integral of Psi_x Psi_y (zero in 1D)
};

/** The same integrals by per-cell quadrature of the constant gradients;
 *  exact, and independent of the bond-sum route. */
GradientIntegrals gradient_integrals(const FemFunction& f);

/** Exact integral of Psi^2 (the integrand is quadratic per cell). */
double l2_integral(const FemFunction& f);

struct IdentityCheck {
  double lhs;
  double rhs;
};

/** Both sides of the lattice-vs-interpolant mass identity:
 *  mu^n sum psi^2  =  integral Psi^2 + (mu^2/6) * correction, where the
 *  correction is integral Psi_x^2 in 1D and
 *  integral (Psi_x^2 + Psi_y^2 - Psi_x Psi_y) in 2D. */
IdentityCheck l2_mass_identity_check(const FemFunction& f);

/** Samples a radial profile at the shifted nodes mesh*(l + offset). */
LatticeField project(const ContinuumProfile& prof, double mesh, int radius,
                     const ModeSpec& mode);

/** Samples an arbitrary function; in 1D the second argument is passed 0. */
LatticeField project(const std::function<double(double, double)>& fn, int dim,
                     double mesh, int radius, const ModeSpec& mode);

/** Samples an interpolant; with matching mesh/radius/offset this returns the
 *  base field exactly. */
LatticeField project(const FemFunction& f, double mesh, int radius,
                     const ModeSpec& mode);

/** Quadrature-minus-sum defect of the potential term,
 *  integral |Psi|^(q+2) - mu^n sum |psi_l|^(q+2), with the integral via
 *  adaptive per-cell Gauss quadrature (relative error below 1e-10).
 *  Requires q >= 1. */
double euler_maclaurin_residual(const FemFunction& f, double q);

/** H1-norm distance between a 1D interpolant and a radial profile,
 *  sqrt(integral (Psi - psi)^2 + (Psi' - psi')^2), per-cell Gauss
 *  quadrature. */
double h1_error_1d(const FemFunction& f, const ContinuumProfile& prof);

}  // namespace dnls
