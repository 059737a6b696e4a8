#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dnls/continuum.hpp"
#include "dnls/fem.hpp"
#include "dnls/lattice.hpp"
#include "dnls/solver.hpp"

using namespace dnls;

namespace {

const ContinuumProfile& unit_1d() {
  static const ContinuumProfile prof = unit_ground_state(1, 1.0);
  return prof;
}

const ContinuumProfile& unit_2d() {
  static const ContinuumProfile prof = unit_ground_state(2, 0.5);
  return prof;
}

ContinuumProfile zero_profile() {
  ContinuumProfile z;
  z.dim = 1;
  z.p = 1.0;
  z.lambda_c = -1.0;
  z.amplitude = 0.0;
  z.decay_rate = 1.0;
  z.step = 0.1;
  z.values.assign(5, 0.0);
  z.derivs.assign(5, 0.0);
  z.switch_radius = 0.3;
  z.tail_coeff = 0.0;
  return z;
}

double qmu_distance(const LatticeField& a, const LatticeField& b) {
  LatticeField diff = a;
  for (std::size_t k = 0; k < diff.size(); ++k)
    diff.values()[k] -= b.values()[k];
  return qmu_norm(diff);
}

LatticeField random_field(int dim, double mesh, int box, unsigned seed) {
  LatticeField f(dim, mesh, box);
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> pick(-1.5, 1.5);
  for (double& v : f.values()) v = pick(gen);
  return f;
}

}  // namespace

TEST_CASE("log-log slope fit recovers an exact power law") {
  const std::vector<double> xs = {0.4, 0.2, 0.1};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * std::pow(x, 2.5));
  CHECK(fit_log_slope(xs, ys) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(fit_log_slope({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_log_slope({1.0, 2.0}, {1.0, -2.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_log_slope({1.0, 1.0}, {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("automatic box radius tracks the profile decay range") {
  const ContinuumProfile& prof = unit_1d();
  CHECK(auto_radius(prof, 0.4) == 284);
  CHECK(auto_radius(prof, 0.2) == 567);
  CHECK(auto_radius(prof, 0.1) == 1133);
  CHECK(auto_radius(prof, 0.05) == 2266);
  CHECK_THROWS_AS(auto_radius(prof, 0.0), std::invalid_argument);
}

TEST_CASE("initial guess is unit-norm, symmetric, and proportional to the "
          "profile sample") {
  const ContinuumProfile& prof = unit_1d();
  for (Mode label : {Mode::ST, Mode::P}) {
    const ModeSpec mode = ModeSpec::make(label, 1);
    const LatticeField guess = initial_guess(prof, mode, 0.2, 567);
    CHECK(norm_d(guess) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(symmetry_defect(guess, mode) == 0.0);
    CHECK(guess.at(0) > 0.0);

    const LatticeField raw = project(prof, 0.2, 567, mode);
    const double ratio = guess.at(0) / raw.at(0);
    CHECK(guess.at(37) / raw.at(37) == doctest::Approx(ratio).epsilon(1e-12));
  }
  CHECK_THROWS_AS(
      initial_guess(zero_profile(), ModeSpec::make(Mode::ST, 1), 0.2, 4),
      std::invalid_argument);
}

TEST_CASE("sampled guess leaves a residual that shrinks quadratically") {
  const ContinuumProfile& prof = unit_1d();
  const ModeSpec mode = ModeSpec::make(Mode::ST, 1);
  const std::vector<double> mus = {0.4, 0.2, 0.1};
  std::vector<double> residuals;
  for (double mu : mus) {
    const LatticeField guess =
        initial_guess(prof, mode, mu, auto_radius(prof, mu));
    const double lam = lambda_estimate(guess, 1.0);
    residuals.push_back(sup_norm(stationary_residual(guess, 1.0, lam)));
  }
  const double slope = fit_log_slope(mus, residuals);
  CHECK(slope > 1.7);
  CHECK(slope < 2.3);
}

TEST_CASE("one-dimensional ground mode hits the pinned frequency") {
  const ContinuumProfile& prof = unit_1d();
  const ModeSpec mode = ModeSpec::make(Mode::ST, 1);
  const LatticeField guess = initial_guess(prof, mode, 0.2, 567);
  const BreatherResult res = solve_breather(guess, mode, 1.0, 1e-12, 50);

  CHECK(res.iterations >= 1);
  CHECK(res.iterations <= 10);
  CHECK(res.residual_inf <= 1e-12);
  CHECK(std::abs(norm_d(res.field) - 1.0) <= 1e-12);
  CHECK(res.lambda == doctest::Approx(-0.06253043282844).epsilon(1e-8));
  CHECK(res.lambda < prof.lambda_c);
  CHECK(res.field.at(0) > 0.0);
  for (int i : {1, 50, 300}) CHECK(res.field.at(i) == res.field.at(-i));

  SUBCASE("curvature margins match the pinned values") {
    const double margin = coercivity_check(res);
    CHECK(margin == doctest::Approx(2.104e-2).epsilon(0.02));
    CHECK(margin > 0.0);

    const double iterative = coercivity_check(res, true, 0);
    CHECK(iterative == doctest::Approx(margin).epsilon(1e-6));

    const double unrestricted = coercivity_check(res, false);
    CHECK(std::abs(unrestricted) <= 1e-10);
  }

  SUBCASE("mesh-free normal form keeps the residual identity") {
    const MuFreeForm form = rescale_to_mu_free(res);
    CHECK(form.phi.mesh() == 1.0);
    CHECK(form.lambda_tilde == doctest::Approx(0.04 * res.lambda).epsilon(1e-15));
    CHECK(form.mass_target == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(dot(form.phi, form.phi) ==
          doctest::Approx(form.mass_target).epsilon(1e-12));
    const LatticeField resid =
        stationary_residual(form.phi, 1.0, form.lambda_tilde);
    CHECK(restricted_sup_norm(resid, res.mode) <= 10.0 * 1e-12);
  }

  SUBCASE("iterative and direct Newton paths agree") {
    SolverControls controls;
    controls.direct_limit = 0;
    const BreatherResult iter_res = solve_breather(guess, mode, 1.0, controls);
    CHECK(iter_res.residual_inf <= 1e-12);
    CHECK(iter_res.iterations <= 12);
    CHECK(qmu_distance(iter_res.field, res.field) <= 1e-9);
  }
}

TEST_CASE("half-offset mode converges, stays distinct, and costs energy") {
  const ContinuumProfile& prof = unit_1d();
  const ModeSpec on_site = ModeSpec::make(Mode::ST, 1);
  const ModeSpec half = ModeSpec::make(Mode::P, 1);

  for (double mu : {0.4, 0.2}) {
    const int box = auto_radius(prof, mu);
    const BreatherResult st =
        solve_breather(initial_guess(prof, on_site, mu, box), on_site, 1.0);
    const BreatherResult pp =
        solve_breather(initial_guess(prof, half, mu, box), half, 1.0);
    CHECK(st.residual_inf <= 1e-12);
    CHECK(pp.residual_inf <= 1e-12);
    CHECK(symmetry_defect(pp.field, half) == 0.0);
    CHECK(qmu_distance(st.field, pp.field) > 10.0 * 1e-12);
    // The on-site arrangement is the energetically preferred one.
    CHECK(hamiltonian_d(st.field, 1.0) <=
          hamiltonian_d(pp.field, 1.0) + 1e-14);
  }
}

TEST_CASE("mesh ladder study shows first-order convergence") {
  const ModeSpec mode = ModeSpec::make(Mode::ST, 1);
  const ConvergenceReport report =
      convergence_study(mode, 1.0, {0.1, 0.4, 0.2}, 1e-12);

  CHECK_FALSE(report.partial);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].mu == 0.4);
  CHECK(report.rows[1].mu == 0.2);
  CHECK(report.rows[2].mu == 0.1);
  CHECK(report.lambda_c == doctest::Approx(-0.0625).epsilon(1e-12));

  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    CHECK(report.rows[k].iterations <= 10);
    if (k > 0) {
      CHECK(report.rows[k].qmu_error < report.rows[k - 1].qmu_error);
      CHECK(std::abs(report.rows[k].lambda - report.lambda_c) <
            std::abs(report.rows[k - 1].lambda - report.lambda_c));
    }
  }
  CHECK(report.qmu_order >= 0.8);
  CHECK(report.sup_order >= 0.8);
}

TEST_CASE("convergence study rejects bad ladders") {
  const ModeSpec mode = ModeSpec::make(Mode::ST, 1);
  CHECK_THROWS_AS(convergence_study(mode, 1.0, {0.4, 0.2}, 1e-12),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(mode, 1.0, {1.2, 0.4, 0.2}, 1e-12),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(mode, 1.0, {0.4, 0.4, 0.2}, 1e-12),
                  std::invalid_argument);
}

TEST_CASE("two-dimensional modes on a truncated box converge and differ") {
  const ContinuumProfile& prof = unit_2d();
  const int box = 40;
  const double mu = 0.5;

  std::vector<BreatherResult> results;
  for (Mode label : {Mode::ST, Mode::P, Mode::Hx, Mode::Hy}) {
    const ModeSpec mode = ModeSpec::make(label, 2);
    const LatticeField guess = initial_guess(prof, mode, mu, box);
    results.push_back(solve_breather(guess, mode, 0.5, 1e-12, 50));
    const BreatherResult& res = results.back();
    CHECK(res.iterations <= 15);
    CHECK(res.residual_inf <= 1e-12);
    CHECK(std::abs(norm_d(res.field) - 1.0) <= 1e-12);
    CHECK(symmetry_defect(res.field, mode) == 0.0);
  }

  for (std::size_t a = 0; a < results.size(); ++a)
    for (std::size_t b = a + 1; b < results.size(); ++b)
      CHECK(qmu_distance(results[a].field, results[b].field) > 1e-6);

  // Half-offset axes force the unpaired plane to zero.
  const LatticeField& hx = results[2].field;
  const LatticeField& hy = results[3].field;
  for (int j = -box; j <= box; ++j) CHECK(hx.at(box, j) == 0.0);
  for (int i = -box; i <= box; ++i) CHECK(hy.at(i, box) == 0.0);

  // The two axis modes are transposes of each other.
  double transpose_gap = 0.0;
  for (int i = -box; i <= box; ++i)
    for (int j = -box; j <= box; ++j)
      transpose_gap =
          std::max(transpose_gap, std::abs(hx.at(i, j) - hy.at(j, i)));
  CHECK(transpose_gap <= 1e-9);

  SUBCASE("dense and iterative curvature margins agree in 2D") {
    const double dense = coercivity_check(results[0], true, 5000);
    const double sparse = coercivity_check(results[0], true, 0);
    CHECK(dense > 0.0);
    CHECK(sparse == doctest::Approx(dense).epsilon(1e-6));
  }
}

TEST_CASE("sup bound holds with the documented constant") {
  LatticeField delta(1, 1.0, 3);
  delta.at(0) = 1.0;
  const auto [lhs, rhs] = sup_bound_check(delta);
  CHECK(lhs == 1.0);
  CHECK(rhs == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-15));

  unsigned seed = 99u;
  for (int dim : {1, 2}) {
    for (double mu : {0.3, 0.7}) {
      for (int trial = 0; trial < 25; ++trial) {
        const LatticeField f = random_field(dim, mu, 6, seed++);
        const auto [lo, hi] = sup_bound_check(f);
        CHECK(lo <= hi * (1.0 + 1e-13));
      }
    }
  }
}

TEST_CASE("solver reports failures honestly") {
  const ContinuumProfile& prof = unit_1d();
  const ModeSpec mode = ModeSpec::make(Mode::ST, 1);

  LatticeField coarse(1, 1.5, 4);
  coarse.at(0) = 1.0;
  try {
    solve_breather(coarse, mode, 1.0);
    FAIL("expected basin failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("basin") != std::string::npos);
  }

  const LatticeField zero(1, 0.2, 4);
  CHECK_THROWS_AS(solve_breather(zero, mode, 1.0), std::invalid_argument);

  const LatticeField guess = initial_guess(prof, mode, 0.2, 567);
  try {
    solve_breather(guess, mode, 1.0, 1e-12, 1);
    FAIL("expected an iteration budget failure");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("residual history") != std::string::npos);
  }

  CHECK_THROWS_AS(
      solve_breather(guess, ModeSpec::make(Mode::Hx, 2), 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(solve_breather(guess, mode, 1.0, -1.0, 50),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_breather(guess, mode, 1.0, 1e-12, 0),
                  std::invalid_argument);
}
