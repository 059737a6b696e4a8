#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "dnls/continuum.hpp"

using namespace dnls;

namespace {

ContinuumProfile zero_profile() {
  ContinuumProfile prof;
  prof.dim = 1;
  prof.p = 1.0;
  prof.lambda_c = -1.0;
  prof.amplitude = 0.0;
  prof.decay_rate = 1.0;
  prof.step = 1.0;
  prof.values.assign(5, 0.0);
  prof.derivs.assign(5, 0.0);
  prof.switch_radius = 0.0;
  prof.tail_coeff = 0.0;
  return prof;
}

}  // namespace

TEST_CASE("closed-form 1D profile") {
  const ContinuumProfile prof = explicit_ground_state_1d();
  CHECK(prof.dim == 1);
  CHECK(prof.lambda_c == -0.25);
  CHECK(prof.amplitude == doctest::Approx(0.70710678).epsilon(1e-8));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (double r : {0.0, 0.37, 1.0, 2.0, 5.5, 11.0, 20.0}) {
    CHECK(prof.value(r) ==
          doctest::Approx(inv_sqrt2 / std::cosh(r / 2)).epsilon(1e-12));
    CHECK(prof.derivative(r) ==
          doctest::Approx(-0.5 * inv_sqrt2 * std::tanh(r / 2) /
                          std::cosh(r / 2))
              .epsilon(1e-11));
  }
  CHECK(prof.value(-3.0) == prof.value(3.0));  // radial evaluation
  CHECK(prof.value(prof.r_max()) < 1e-12 * prof.amplitude);
}

TEST_CASE("closed-form profile satisfies its equation") {
  const ContinuumProfile prof = explicit_ground_state_1d();
  CHECK(ode_residual_max(prof, 1.0) <= 1e-10 * prof.amplitude);
  CHECK(deriv_consistency_max(prof) <= 1e-10);
}

TEST_CASE("functionals of the closed-form profile") {
  const ContinuumProfile prof = explicit_ground_state_1d();
  const ContinuumFunctionals f = continuum_functionals(prof, 1.0);
  CHECK(f.mass == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(f.gradient_energy == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
  CHECK(f.potential == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(f.hamiltonian == doctest::Approx(-1.0 / 6.0).epsilon(1e-8));
  CHECK(f.quad_error < 1e-9);
  // Eigenvalue relation lambda N = grad - potential closes the books.
  CHECK(prof.lambda_c * f.mass ==
        doctest::Approx(f.gradient_energy - f.potential).epsilon(1e-9));
}

TEST_CASE("functionals of the zero profile") {
  const ContinuumFunctionals f = continuum_functionals(zero_profile(), 1.0);
  CHECK(f.mass == 0.0);
  CHECK(f.hamiltonian == 0.0);
  CHECK_THROWS(rescale_to_unit_mass(zero_profile()));
}

TEST_CASE("shooting reproduces the 1D closed forms") {
  // lambda = -1: amplitude sqrt(2), since A sech(Br) solves with B^2 = -lambda,
  // A^2 = 2 B^2.
  const ContinuumProfile s1 = shoot_radial_ground_state(1, 1.0, -1.0);
  CHECK(s1.amplitude == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(ode_residual_max(s1, 1.0) <= 1e-8 * s1.amplitude);

  const ContinuumProfile s2 = shoot_radial_ground_state(1, 1.0, -0.25);
  const ContinuumProfile ex = explicit_ground_state_1d();
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double r = 0.3 * k;
    worst = std::max(worst, std::abs(s2.value(r) - ex.value(r)));
  }
  CHECK(worst <= 1e-7);
}

TEST_CASE("shooting in 2D produces a monotone positive profile") {
  const ContinuumProfile s = shoot_radial_ground_state(2, 0.5, -1.0);
  CHECK(s.amplitude == doctest::Approx(2.39195640).epsilon(1e-5));
  for (std::size_t k = 0; k + 1 < s.values.size(); ++k) {
    CHECK(s.values[k] > 0.0);
    CHECK(s.values[k + 1] < s.values[k]);
  }
  CHECK(ode_residual_max(s, 0.5) <= 1e-8 * s.amplitude);
  const ContinuumFunctionals f = continuum_functionals(s, 0.5);
  CHECK(f.mass == doctest::Approx(31.00315392).epsilon(1e-5));
  CHECK(s.lambda_c * f.mass ==
        doctest::Approx(f.gradient_energy - f.potential).epsilon(1e-7));
}

TEST_CASE("mass rescaling of the 1D profile") {
  // Mass-2 input: the scaling exponent 2/p - dim is 1, so s = 1/2 and the
  // eigenvalue becomes -1/16.
  const ContinuumProfile unit =
      rescale_to_unit_mass(explicit_ground_state_1d());
  CHECK(continuum_functionals(unit, 1.0).mass ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(unit.lambda_c == doctest::Approx(-1.0 / 16.0).epsilon(1e-11));
  CHECK(unit.amplitude ==
        doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(1e-11));
  CHECK(unit.decay_rate == doctest::Approx(0.25).epsilon(1e-11));
  CHECK(ode_residual_max(unit, 1.0) <= 1e-8 * unit.amplitude);
  // Closed form of the rescaled member.
  for (double r : {0.0, 1.0, 4.0, 10.0})
    CHECK(unit.value(r) ==
          doctest::Approx(unit.amplitude / std::cosh(r / 4)).epsilon(1e-9));

  // Unit-mass input is a fixed point.
  const ContinuumProfile again = rescale_to_unit_mass(unit);
  CHECK(again.lambda_c == doctest::Approx(unit.lambda_c).epsilon(1e-12));
  for (double r : {0.0, 2.0, 7.0})
    CHECK(again.value(r) == doctest::Approx(unit.value(r)).epsilon(1e-12));
}

TEST_CASE("unit-mass 2D ground state") {
  const ContinuumProfile unit = unit_ground_state(2, 0.5);
  CHECK(continuum_functionals(unit, 0.5).mass ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(unit.lambda_c == doctest::Approx(-0.03225478).epsilon(1e-5));
  CHECK(unit.amplitude == doctest::Approx(0.07715203).epsilon(1e-5));
  CHECK(ode_residual_max(unit, 0.5) <= 1e-8 * unit.amplitude);
}

TEST_CASE("scaling stationarity of the hamiltonian at unit mass") {
  // Along the mass-preserving family s^(dim/2) psi(s z) the integrals scale
  // exactly; the derivative of H at s=1 vanishes for the ground state.
  struct Case {
    int dim;
    double p;
  };
  for (const Case c : {Case{1, 1.0}, Case{2, 0.5}}) {
    const ContinuumProfile unit = unit_ground_state(c.dim, c.p);
    const ContinuumFunctionals f = continuum_functionals(unit, c.p);
    auto ham = [&](double s) {
      return s * s * f.gradient_energy -
             std::pow(s, c.dim * c.p) * f.potential / (c.p + 1.0);
    };
    const double eps = 1e-3;
    const double fd = (ham(1.0 + eps) - ham(1.0 - eps)) / (2 * eps);
    CHECK(std::abs(fd) <= 1e-5);
  }
}

TEST_CASE("decay radii follow the exponential tail") {
  const ContinuumProfile ex = explicit_ground_state_1d();
  // sech tail: value/amplitude = 1e-12 at r = 2 ln(2e12).
  CHECK(decay_radius(ex, 1e-12) ==
        doctest::Approx(2.0 * std::log(2e12)).epsilon(1e-6));
  const ContinuumProfile unit = rescale_to_unit_mass(ex);
  CHECK(decay_radius(unit, 1e-12) ==
        doctest::Approx(4.0 * std::log(2e12)).epsilon(1e-6));
  CHECK(decay_radius(ex, 0.5) < decay_radius(ex, 1e-3));
  CHECK_THROWS(decay_radius(ex, 1.5));
}

TEST_CASE("argument validation") {
  CHECK_THROWS(shoot_radial_ground_state(3, 1.0, -1.0));
  CHECK_THROWS(shoot_radial_ground_state(1, 0.4, -1.0));
  CHECK_THROWS(shoot_radial_ground_state(1, 2.0, -1.0));
  CHECK_THROWS(shoot_radial_ground_state(2, 1.5, -1.0));
  CHECK_THROWS(shoot_radial_ground_state(1, 1.0, 0.5));
}
