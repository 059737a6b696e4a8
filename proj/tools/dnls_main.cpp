#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "CLI11.hpp"
#include "json.hpp"

#include "dnls/continuum.hpp"
#include "dnls/dynamics.hpp"
#include "dnls/fem.hpp"
#include "dnls/io.hpp"
#include "dnls/lattice.hpp"
#include "dnls/solver.hpp"

#define DNLS_VERSION "1.0.0"

namespace {

using nlohmann::ordered_json;
using namespace dnls;

struct RunConfig {
  std::string command;
  int dim = 1;
  double p = 1.0;
  std::string mode = "ST";
  double mu = 0.0;
  std::vector<double> mus;
  int radius = -1;  // -1 selects the automatic decay-radius policy
  double tol = 1e-12;
  int max_iter = 50;
  int trials = 100;
  unsigned seed = 0;
  long long steps = 4096;
  int snapshots = 2;
  std::string out = "out";
};

/** Single-line diagnostics keep stderr machine-parsable. */
std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

[[noreturn]] void config_error(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", one_line(msg).c_str());
  std::exit(2);
}

void validate_exponent(int dim, double p) {
  if (!(p >= 0.5) || !(p < 2.0 / dim))
    config_error("exponent p must satisfy 1/2 <= p < 2/dim (got p=" +
                 format_full(p) + ", dim=" + std::to_string(dim) + ")");
}

ModeSpec validate_mode(const std::string& name, int dim) {
  try {
    return ModeSpec::parse(name, dim);
  } catch (const std::exception& e) {
    config_error(e.what());
  }
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["dim"] = c.dim;
  if (c.command != "fem-check") j["p"] = c.p;
  if (c.command == "breather" || c.command == "convergence" ||
      c.command == "evolve")
    j["mode"] = c.mode;
  if (c.command == "breather" || c.command == "evolve") {
    j["mu"] = c.mu;
    j["radius"] = c.radius < 0 ? ordered_json("auto") : ordered_json(c.radius);
    j["tol"] = c.tol;
    j["max_iter"] = c.max_iter;
  }
  if (c.command == "convergence") {
    j["mus"] = c.mus;
    j["tol"] = c.tol;
  }
  if (c.command == "fem-check") {
    j["trials"] = c.trials;
    j["seed"] = c.seed;
  }
  if (c.command == "evolve") {
    j["steps"] = c.steps;
    j["snapshots"] = c.snapshots;
  }
  j["out"] = c.out;
  return j;
}

ordered_json versions_json() {
  ordered_json v;
  v["dnls"] = DNLS_VERSION;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
               std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["cli11"] = CLI11_VERSION;
  v["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
              std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

class ManifestWriter {
 public:
  ManifestWriter(const RunConfig& config)
      : config_(config), start_(std::chrono::steady_clock::now()) {}

  void write(bool failed, const std::string& error = "") const {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    ordered_json m;
    m["config"] = config_json(config_);
    m["versions"] = versions_json();
    m["wall_time"] = elapsed;
    if (failed) {
      m["failed"] = true;
      m["error"] = one_line(error);
    }
    write_json_file(config_.out + "/manifest.json", m);
  }

 private:
  RunConfig config_;
  std::chrono::steady_clock::time_point start_;
};

int pick_radius(const RunConfig& c, const ContinuumProfile& prof) {
  return c.radius >= 0 ? c.radius : auto_radius(prof, c.mu);
}

BreatherResult solve_configured(const RunConfig& c, const ModeSpec& mode) {
  const ContinuumProfile prof = unit_ground_state(c.dim, c.p);
  const int radius = pick_radius(c, prof);
  const LatticeField guess = initial_guess(prof, mode, c.mu, radius);
  return solve_breather(guess, mode, c.p, c.tol, c.max_iter);
}

ordered_json breather_json(const BreatherResult& res) {
  ordered_json j;
  j["mode"] = res.mode.name();
  j["p"] = res.p;
  j["mu"] = res.field.mesh();
  j["radius"] = res.field.radius();
  j["lambda"] = res.lambda;
  j["residual_inf"] = res.residual_inf;
  j["iterations"] = res.iterations;
  if (res.coercivity_margin)
    j["coercivity_margin"] = *res.coercivity_margin;
  else
    j["coercivity_margin"] = nullptr;
  return j;
}

int run_ground_state(const RunConfig& c) {
  const ContinuumProfile prof = unit_ground_state(c.dim, c.p);
  write_profile_csv(c.out + "/profile.csv", prof);
  write_json_file(c.out + "/profile.json", profile_summary_json(prof));
  std::printf("wrote %s/profile.csv and profile.json (lambda_c=%s)\n",
              c.out.c_str(), format_full(prof.lambda_c).c_str());
  return 0;
}

int run_breather(const RunConfig& c, const ModeSpec& mode) {
  BreatherResult res = solve_configured(c, mode);
  res.coercivity_margin = coercivity_check(res, true);
  write_field_csv(c.out + "/breather.csv", res.field);
  write_json_file(c.out + "/breather.json", breather_json(res));
  std::printf("wrote %s/breather.json (lambda=%s, %d iterations, "
              "residual %s)\n",
              c.out.c_str(), format_full(res.lambda).c_str(), res.iterations,
              format_full(res.residual_inf).c_str());
  return 0;
}

int run_convergence(const RunConfig& c, const ModeSpec& mode) {
  const ConvergenceReport report = convergence_study(mode, c.p, c.mus, c.tol);

  std::string csv = "mu,radius,qmu_error,sup_error,lambda,iterations\n";
  for (const ConvergenceRow& row : report.rows)
    csv += format_full(row.mu) + "," + std::to_string(row.radius) + "," +
           format_full(row.qmu_error) + "," + format_full(row.sup_error) +
           "," + format_full(row.lambda) + "," +
           std::to_string(row.iterations) + "\n";
  {
    std::FILE* f = std::fopen((c.out + "/convergence.csv").c_str(), "w");
    if (!f) config_error("cannot write " + c.out + "/convergence.csv");
    std::fputs(csv.c_str(), f);
    std::fclose(f);
  }

  ordered_json j;
  j["dim"] = report.dim;
  j["mode"] = mode.name();
  j["p"] = report.p;
  j["tol"] = report.tol;
  j["lambda_c"] = report.lambda_c;
  j["fitted_order_qmu"] = report.qmu_order;
  j["fitted_order_sup"] = report.sup_order;
  j["partial"] = report.partial;
  j["errors"] = report.errors;
  ordered_json rows = ordered_json::array();
  for (const ConvergenceRow& row : report.rows) {
    ordered_json r;
    r["mu"] = row.mu;
    r["radius"] = row.radius;
    r["qmu_error"] = row.qmu_error;
    r["sup_error"] = row.sup_error;
    r["lambda"] = row.lambda;
    r["iterations"] = row.iterations;
    rows.push_back(r);
  }
  j["rows"] = rows;
  write_json_file(c.out + "/convergence.json", j);

  std::printf("wrote %s/convergence.json (order_qmu=%s, order_sup=%s)\n",
              c.out.c_str(), format_full(report.qmu_order).c_str(),
              format_full(report.sup_order).c_str());
  if (report.partial) {
    std::string what = "convergence study incomplete:";
    for (const std::string& e : report.errors) what += " [" + e + "]";
    throw std::runtime_error(what);
  }
  return 0;
}

int run_fem_check(const RunConfig& c) {
  constexpr double kRelTol = 1e-12;
  std::mt19937 gen(c.seed);
  std::uniform_real_distribution<double> pick(-1.5, 1.5);
  const std::vector<Mode> modes =
      c.dim == 1 ? std::vector<Mode>{Mode::ST, Mode::P}
                 : std::vector<Mode>{Mode::ST, Mode::P, Mode::Hx, Mode::Hy};

  ordered_json checks = ordered_json::array();
  int failures = 0;
  auto record = [&](const char* identity, int trial, double lhs, double rhs) {
    const double abs_err = std::abs(lhs - rhs);
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    const double rel_err = scale > 0.0 ? abs_err / scale : 0.0;
    ordered_json r;
    r["identity"] = identity;
    r["trial"] = trial;
    r["lhs"] = lhs;
    r["rhs"] = rhs;
    r["abs_err"] = abs_err;
    r["rel_err"] = rel_err;
    checks.push_back(r);
    if (!(rel_err <= kRelTol)) ++failures;
  };

  for (int t = 0; t < c.trials; ++t) {
    const double mesh = 0.2 + 0.1 * (t % 5);
    LatticeField f(c.dim, mesh, c.dim == 1 ? 40 : 9);
    for (double& v : f.values()) v = pick(gen);
    const ModeSpec mode =
        ModeSpec::make(modes[static_cast<std::size_t>(t) % modes.size()],
                       c.dim);
    const FemFunction fem(f, mode);

    const GradientIntegrals gi = gradient_integrals(fem);
    record("gradient", t, gradient_energy(fem), gi.xx + gi.yy);
    const IdentityCheck mass = l2_mass_identity_check(fem);
    record("mass", t, mass.lhs, mass.rhs);
  }

  ordered_json j;
  j["dim"] = c.dim;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["rel_tolerance"] = kRelTol;
  j["failures"] = failures;
  j["checks"] = checks;
  write_json_file(c.out + "/fem_check.json", j);
  std::printf("wrote %s/fem_check.json (%d trials, %d failures)\n",
              c.out.c_str(), c.trials, failures);
  if (failures > 0)
    throw std::runtime_error(std::to_string(failures) +
                             " identity checks exceeded tolerance");
  return 0;
}

int run_evolve(const RunConfig& c, const ModeSpec& mode) {
  const BreatherResult res = solve_configured(c, mode);
  const double period = 2.0 * std::acos(-1.0) / std::abs(res.lambda);
  const double dt = period / static_cast<double>(c.steps);
  const int legs = c.snapshots - 1;

  char name[64];
  ComplexLatticeState state(res.field);
  std::snprintf(name, sizeof name, "/snapshot_%03d.csv", 0);
  write_state_csv(c.out + name, state);
  const ComplexLatticeState initial = state;
  for (int leg = 1; leg <= legs; ++leg) {
    state = evolve(state, c.p, period / legs, dt);
    std::snprintf(name, sizeof name, "/snapshot_%03d.csv", leg);
    write_state_csv(c.out + name, state);
  }

  const auto drift = conserved_drift(initial, state, c.p);
  ordered_json j;
  j["T"] = period;
  j["dt"] = dt;
  j["dN"] = drift.first;
  j["dH"] = drift.second;
  j["return_defect"] = max_state_difference(initial, state);
  write_json_file(c.out + "/evolve.json", j);
  std::printf("wrote %s/evolve.json (return defect %s over one period)\n",
              c.out.c_str(), format_full(double(j["return_defect"])).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete breathers of the focusing discrete NLS equation: "
               "continuum ground states, lattice continuation, convergence "
               "studies, interpolation identity checks, and time evolution."};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI file with [subcommand] sections; command-line flags "
                 "override file values");
  app.footer("Artifacts are written to --out (or $BREATHER_OUT when set), "
             "including a manifest.json with the resolved configuration.");

  RunConfig c;

  auto add_common = [&](CLI::App* s, bool with_p) {
    s->add_option("--dim", c.dim, "Spatial dimension")
        ->required()
        ->check(CLI::IsMember({1, 2}));
    if (with_p)
      s->add_option("--p", c.p,
                    "Nonlinearity exponent, 1/2 <= p < 2/dim")
          ->required();
    s->add_option("--out", c.out, "Output directory")->capture_default_str();
  };
  auto add_solver = [&](CLI::App* s) {
    s->add_option("--mode", c.mode,
                  "Symmetry center: ST, P (and Hx, Hy in 2D)")
        ->capture_default_str();
    s->add_option("--mu", c.mu, "Lattice mesh size, 0 < mu < 1")
        ->required()
        ->check(CLI::PositiveNumber);
    s->add_option("--radius", c.radius,
                  "Box radius K; omit for the automatic decay-based choice")
        ->check(CLI::NonNegativeNumber);
    s->add_option("--tol", c.tol, "Newton residual tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    s->add_option("--max-iter", c.max_iter, "Newton iteration budget")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  CLI::App* ground = app.add_subcommand(
      "ground-state", "Radial continuum ground state at unit mass");
  add_common(ground, true);

  CLI::App* breather = app.add_subcommand(
      "breather", "Continue one breather from the continuum profile");
  add_common(breather, true);
  add_solver(breather);

  CLI::App* conv = app.add_subcommand(
      "convergence", "Continuation across a ladder of mesh sizes");
  add_common(conv, true);
  conv->add_option("--mode", c.mode,
                   "Symmetry center: ST, P (and Hx, Hy in 2D)")
      ->capture_default_str();
  conv->add_option("--mus", c.mus,
                   "Comma-separated mesh sizes, at least three")
      ->required()
      ->delimiter(',');
  conv->add_option("--tol", c.tol, "Newton residual tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  CLI::App* fem = app.add_subcommand(
      "fem-check", "Randomized interpolation identity checks");
  add_common(fem, false);
  fem->add_option("--trials", c.trials, "Random fields per identity")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  fem->add_option("--seed", c.seed, "Random seed")->capture_default_str();

  CLI::App* evolve_cmd = app.add_subcommand(
      "evolve", "Evolve the solved breather for one period");
  add_common(evolve_cmd, true);
  add_solver(evolve_cmd);
  evolve_cmd->add_option("--steps", c.steps, "Time steps per period")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  evolve_cmd
      ->add_option("--snapshots", c.snapshots,
                   "Snapshot count including the endpoints")
      ->capture_default_str()
      ->check(CLI::Range(2, 1000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::fprintf(stderr, "error: %s\n", one_line(e.what()).c_str());
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();

  // Validation before any computation.
  if (c.command != "fem-check") validate_exponent(c.dim, c.p);
  ModeSpec mode = ModeSpec::make(Mode::ST, c.dim);
  if (c.command == "breather" || c.command == "convergence" ||
      c.command == "evolve")
    mode = validate_mode(c.mode, c.dim);

  if (const char* env = std::getenv("BREATHER_OUT"); env && *env)
    c.out = env;
  std::error_code ec;
  std::filesystem::create_directories(c.out, ec);
  if (ec) config_error("cannot create output directory " + c.out);

  const ManifestWriter manifest(c);
  try {
    int status = 0;
    if (c.command == "ground-state")
      status = run_ground_state(c);
    else if (c.command == "breather")
      status = run_breather(c, mode);
    else if (c.command == "convergence")
      status = run_convergence(c, mode);
    else if (c.command == "fem-check")
      status = run_fem_check(c);
    else
      status = run_evolve(c, mode);
    manifest.write(false);
    return status;
  } catch (const std::exception& e) {
    manifest.write(true, e.what());
    std::fprintf(stderr, "error: %s\n", one_line(e.what()).c_str());
    return 1;
  }
}
