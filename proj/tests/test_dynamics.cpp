#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "dnls/continuum.hpp"
#include "dnls/dynamics.hpp"
#include "dnls/lattice.hpp"
#include "dnls/solver.hpp"

using namespace dnls;

namespace {

using Complex = std::complex<double>;

ComplexLatticeState random_state(int dim, double mesh, int box,
                                 unsigned seed) {
  ComplexLatticeState s(dim, mesh, box);
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> pick(-1.0, 1.0);
  for (Complex& z : s.values()) z = Complex(pick(gen), pick(gen));
  return s;
}

BreatherResult solved_breather(double mesh, double tol) {
  static const ContinuumProfile prof = unit_ground_state(1, 1.0);
  const ModeSpec mode = ModeSpec::make(Mode::ST, 1);
  const int radius = auto_radius(prof, mesh);
  const LatticeField guess = initial_guess(prof, mode, mesh, radius);
  return solve_breather(guess, mode, 1.0, tol, 50);
}

double period_return_defect(const BreatherResult& res, int steps_per_period,
                            double* norm_drift = nullptr,
                            double* energy_drift = nullptr) {
  const ComplexLatticeState start(res.field);
  const double period = 2.0 * std::acos(-1.0) / std::abs(res.lambda);
  const ComplexLatticeState end =
      evolve(start, res.p, period, period / steps_per_period);
  const auto drift = conserved_drift(start, end, res.p);
  if (norm_drift) *norm_drift = drift.first;
  if (energy_drift) *energy_drift = drift.second;
  return max_state_difference(start, end);
}

}  // namespace

TEST_CASE("complex functionals agree exactly on real data") {
  for (int dim : {1, 2}) {
    std::mt19937 gen(dim == 1 ? 11u : 12u);
    std::uniform_real_distribution<double> pick(-1.5, 1.5);
    LatticeField f(dim, 0.3, 7);
    for (double& v : f.values()) v = pick(gen);

    const ComplexLatticeState s(f);
    CHECK(s.dim() == dim);
    CHECK(s.mesh() == 0.3);
    CHECK(s.radius() == 7);
    CHECK(s.time == 0.0);
    CHECK(norm_d(s) == norm_d(f));
    CHECK(hamiltonian_d(s, 1.0) == hamiltonian_d(f, 1.0));
    const double cell = dim == 1 ? 0.3 : 0.09;
    CHECK(quadratic_energy(s) ==
          doctest::Approx(cell * bond_energy(f) / 0.09).epsilon(1e-15));
  }
}

TEST_CASE("state construction rejects bad shapes") {
  CHECK_THROWS_AS(ComplexLatticeState(3, 0.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(ComplexLatticeState(1, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(ComplexLatticeState(1, -0.5, 4), std::invalid_argument);
  CHECK_THROWS_AS(ComplexLatticeState(2, 0.5, -1), std::invalid_argument);
}

TEST_CASE("linear flow alone conserves norm and quadratic energy") {
  EvolveControls linear_only;
  linear_only.nonlinear = false;

  for (int dim : {1, 2}) {
    const int box = dim == 1 ? 40 : 9;
    const ComplexLatticeState s0 =
        random_state(dim, 0.3, box, dim == 1 ? 21u : 22u);
    const double n0 = norm_d(s0);
    const double q0 = quadratic_energy(s0);

    SUBCASE("spectral propagator") {
      const ComplexLatticeState s1 = evolve(s0, 1.0, 3.7, 0.1, linear_only);
      CHECK(std::abs(norm_d(s1) - n0) <= 1e-12 * n0);
      CHECK(std::abs(quadratic_energy(s1) - q0) <= 1e-12 * q0);
    }
    SUBCASE("Krylov propagator") {
      EvolveControls forced = linear_only;
      forced.spectral_limit = 0;
      const ComplexLatticeState s1 = evolve(s0, 1.0, 3.7, 0.1, forced);
      CHECK(std::abs(norm_d(s1) - n0) <= 1e-12 * n0);
      CHECK(std::abs(quadratic_energy(s1) - q0) <= 1e-12 * q0);
    }
  }
}

TEST_CASE("spectral and Krylov propagators agree") {
  for (int dim : {1, 2}) {
    const int box = dim == 1 ? 30 : 8;
    const double p = dim == 1 ? 1.0 : 0.5;
    const ComplexLatticeState s0 =
        random_state(dim, 0.4, box, dim == 1 ? 31u : 32u);
    EvolveControls forced;
    forced.spectral_limit = 0;
    const ComplexLatticeState a = evolve(s0, p, 2.0, 0.05);
    const ComplexLatticeState b = evolve(s0, p, 2.0, 0.05, forced);
    CHECK(max_state_difference(a, b) <= 1e-11);
  }
}

TEST_CASE("gauge rotation commutes with the flow") {
  const ComplexLatticeState s0 = random_state(1, 0.25, 25, 41u);
  const Complex gauge(std::cos(0.7366), std::sin(0.7366));
  ComplexLatticeState rotated = s0;
  for (Complex& z : rotated.values()) z *= gauge;

  ComplexLatticeState evolved_then_rotated = evolve(s0, 1.0, 1.3, 0.05);
  for (Complex& z : evolved_then_rotated.values()) z *= gauge;
  const ComplexLatticeState rotated_then_evolved =
      evolve(rotated, 1.0, 1.3, 0.05);

  CHECK(max_state_difference(evolved_then_rotated, rotated_then_evolved) <=
        1e-13);
}

TEST_CASE("zero state stays zero") {
  const ComplexLatticeState s0(1, 0.5, 10);
  const ComplexLatticeState s1 = evolve(s0, 1.0, 2.0, 0.25);
  CHECK(s1.time == 2.0);
  for (const Complex& z : s1.values()) CHECK(z == Complex(0.0, 0.0));
}

TEST_CASE("step partitioning does not change the linear flow") {
  // The linear propagator is exact, so any partition of [0, T] must give
  // the same state; this exercises the trailing-remainder step.
  EvolveControls linear_only;
  linear_only.nonlinear = false;
  const ComplexLatticeState s0 = random_state(1, 0.3, 20, 51u);

  const ComplexLatticeState whole = evolve(s0, 1.0, 1.0, 1.0, linear_only);
  const ComplexLatticeState ragged = evolve(s0, 1.0, 1.0, 0.3, linear_only);
  const ComplexLatticeState exact = evolve(s0, 1.0, 1.0, 0.25, linear_only);

  CHECK(whole.time == 1.0);
  CHECK(max_state_difference(whole, ragged) <= 1e-13);
  CHECK(max_state_difference(whole, exact) <= 1e-13);
}

TEST_CASE("breather returns after one period with second-order defect") {
  const BreatherResult res = solved_breather(0.2, 1e-12);
  double norm_drift = 0.0;
  double energy_drift = 0.0;
  const double coarse =
      period_return_defect(res, 4096, &norm_drift, &energy_drift);

  // Splitting error at 4096 steps per period, measured against an
  // independent implementation of the same scheme.
  CHECK(coarse == doctest::Approx(3.702e-6).epsilon(0.05));
  CHECK(norm_drift <= 1e-12);
  CHECK(energy_drift <= 1e-8);

  const double fine = period_return_defect(res, 8192);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("return defect shrinks with solver tolerance") {
  const BreatherResult loose = solved_breather(0.4, 1e-3);
  const BreatherResult tight = solved_breather(0.4, 1e-10);
  const double loose_defect = period_return_defect(loose, 1024);
  const double tight_defect = period_return_defect(tight, 1024);
  CHECK(tight_defect < loose_defect);
}

TEST_CASE("invalid evolution requests throw") {
  const ComplexLatticeState s0 = random_state(1, 0.5, 5, 61u);
  CHECK_THROWS_AS(evolve(s0, 1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(evolve(s0, 1.0, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve(s0, 1.0, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve(s0, 1.0, -1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve(s0, 2.0, 1.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve(s0, 0.25, 1.0, 0.1), std::invalid_argument);

  const ComplexLatticeState other = random_state(1, 0.5, 6, 62u);
  CHECK_THROWS_AS(conserved_drift(s0, other, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(max_state_difference(s0, other), std::invalid_argument);
}
