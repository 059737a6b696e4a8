#include "dnls/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "dnls/lattice.hpp"

namespace dnls {

namespace {

constexpr double kNodesPerDecayLength = 1000.0;  // step = 0.001/kappa
constexpr double kRangeDecayLengths = 40.0;      // r_max = 40/kappa
constexpr double kTailSwitchLevel = 1e-6;        // of the amplitude

double bessel_k0(double x) { return x > 700.0 ? 0.0 : std::cyl_bessel_k(0.0, x); }
double bessel_k1(double x) { return x > 700.0 ? 0.0 : std::cyl_bessel_k(1.0, x); }

/** Right-hand side of the first-order system for the radial equation
 *  psi'' = -lambda psi - |psi|^(2p) psi - ((dim-1)/r) psi'. */
struct RadialRhs {
  int dim;
  double p;
  double lambda;

  void operator()(double r, const double y[2], double dy[2]) const {
    dy[0] = y[1];
    dy[1] = -lambda * y[0] - abs_pow_2p(y[0], p) * y[0];
    if (dim == 2) dy[1] -= y[1] / r;
  }
};

/** Adaptive Dormand-Prince 5(4) stepper for the two-component system. */
class Dp5 {
 public:
  Dp5(const RadialRhs& rhs, double atol, double rtol)
      : rhs_(rhs), atol_(atol), rtol_(rtol) {}

  void start(double r, double psi, double dpsi, double h0) {
    r_ = r;
    y_[0] = psi;
    y_[1] = dpsi;
    h_free_ = h0;
  }

  /** One accepted step, clipped so the position never exceeds cap. */
  void step(double cap) {
    for (int tries = 0; tries < 64; ++tries) {
      const double h = std::min(h_free_, cap - r_);
      double ynew[2];
      const double err = attempt(h, ynew);
      const double factor =
          std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        r_ += h;
        y_[0] = ynew[0];
        y_[1] = ynew[1];
        // A step clipped to the cap must not shrink the controller's step.
        h_free_ = h < h_free_ ? std::max(h_free_, h * factor) : h * factor;
        return;
      }
      h_free_ = h * factor;
    }
    throw std::runtime_error("radial integrator failed to find a stable step");
  }

  double r() const { return r_; }
  double psi() const { return y_[0]; }
  double dpsi() const { return y_[1]; }

 private:
  double attempt(double h, double ynew[2]) const {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113,
                            b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695,
                            e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                            e6 = 187.0 / 2100, e7 = 1.0 / 40;

    double k1[2], k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], t[2];
    rhs_(r_, y_, k1);
    for (int i = 0; i < 2; ++i) t[i] = y_[i] + h * a21 * k1[i];
    rhs_(r_ + h / 5, t, k2);
    for (int i = 0; i < 2; ++i)
      t[i] = y_[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs_(r_ + 3 * h / 10, t, k3);
    for (int i = 0; i < 2; ++i)
      t[i] = y_[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs_(r_ + 4 * h / 5, t, k4);
    for (int i = 0; i < 2; ++i)
      t[i] = y_[i] +
             h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs_(r_ + 8 * h / 9, t, k5);
    for (int i = 0; i < 2; ++i)
      t[i] = y_[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                          a64 * k4[i] + a65 * k5[i]);
    rhs_(r_ + h, t, k6);
    for (int i = 0; i < 2; ++i)
      ynew[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                             b5 * k5[i] + b6 * k6[i]);
    rhs_(r_ + h, ynew, k7);

    double err2 = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double y4 = y_[i] + h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                     e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(ynew[i]));
      const double e = (ynew[i] - y4) / sc;
      err2 += e * e;
    }
    return std::sqrt(0.5 * err2);
  }

  RadialRhs rhs_;
  double atol_;
  double rtol_;
  double r_ = 0.0;
  double y_[2] = {0.0, 0.0};
  double h_free_ = 0.0;
};

enum class Shot { cross, rebound };

/** Series start just off the center: psi'' (0) = G(a)/dim with
 *  G(a) = -lambda a - |a|^(2p) a. */
void series_start(const RadialRhs& rhs, double a, double r0, double* psi,
                  double* dpsi) {
  const double g = -rhs.lambda * a - abs_pow_2p(a, rhs.p) * a;
  *psi = a + g * r0 * r0 / (2.0 * rhs.dim);
  *dpsi = g * r0 / rhs.dim;
}

Shot classify(const RadialRhs& rhs, double a, double kappa) {
  Dp5 solver(rhs, 1e-15 * a, 1e-12);
  const double r0 = 1e-7 / kappa;
  double psi, dpsi;
  series_start(rhs, a, r0, &psi, &dpsi);
  if (dpsi > 0.0) return Shot::rebound;  // too small to pull inward at all
  solver.start(r0, psi, dpsi, 1e-3 / kappa);
  const double r_stop = kRangeDecayLengths / kappa;
  while (solver.r() < r_stop) {
    solver.step(r_stop);
    if (solver.psi() <= 0.0) return Shot::cross;
    if (solver.dpsi() > 0.0) return Shot::rebound;
  }
  // Neither event: the trajectory shadows the decaying solution below any
  // resolvable separation; treat as not yet crossing.
  return Shot::rebound;
}

}  // namespace

double ContinuumProfile::value(double r) const {
  r = std::abs(r);
  const double kappa = decay_rate;
  if (r >= switch_radius)
    return dim == 1 ? tail_coeff * std::exp(-kappa * r)
                    : tail_coeff * bessel_k0(kappa * r);
  const double t = r / step;
  const long n = static_cast<long>(values.size());
  long k = static_cast<long>(t);
  if (k > n - 3) k = n - 3;  // defensive; switch radius sits well inside
  const double u = t - static_cast<double>(k - 1);
  double out = 0.0;
  for (long j = 0; j < 4; ++j) {
    double w = 1.0;
    for (long m = 0; m < 4; ++m)
      if (m != j)
        w *= (u - static_cast<double>(m)) / static_cast<double>(j - m);
    const long idx = k - 1 + j;
    out += w * (idx < 0 ? values[static_cast<std::size_t>(-idx)]
                        : values[static_cast<std::size_t>(idx)]);
  }
  return out;
}

double ContinuumProfile::derivative(double r) const {
  r = std::abs(r);
  const double kappa = decay_rate;
  if (r >= switch_radius)
    return dim == 1 ? -kappa * tail_coeff * std::exp(-kappa * r)
                    : -kappa * tail_coeff * bessel_k1(kappa * r);
  const double t = r / step;
  const long n = static_cast<long>(values.size());
  long k = static_cast<long>(t);
  if (k > n - 3) k = n - 3;
  const double u = t - static_cast<double>(k - 1);
  double out = 0.0;
  for (long j = 0; j < 4; ++j) {
    double w = 1.0;
    for (long m = 0; m < 4; ++m)
      if (m != j)
        w *= (u - static_cast<double>(m)) / static_cast<double>(j - m);
    const long idx = k - 1 + j;
    // dpsi/dr is odd in r.
    out += w * (idx < 0 ? -derivs[static_cast<std::size_t>(-idx)]
                        : derivs[static_cast<std::size_t>(idx)]);
  }
  return out;
}

ContinuumProfile explicit_ground_state_1d() {
  ContinuumProfile prof;
  prof.dim = 1;
  prof.p = 1.0;
  prof.lambda_c = -0.25;
  prof.decay_rate = 0.5;
  prof.amplitude = 1.0 / std::sqrt(2.0);
  prof.step = 1e-3 / prof.decay_rate;
  const std::size_t n =
      static_cast<std::size_t>(kNodesPerDecayLength * kRangeDecayLengths) + 1;
  prof.values.resize(n);
  prof.derivs.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = prof.step * static_cast<double>(k);
    const double s = 1.0 / std::cosh(r / 2.0);
    prof.values[k] = prof.amplitude * s;
    prof.derivs[k] = -0.5 * prof.amplitude * s * std::tanh(r / 2.0);
  }
  std::size_t sw = 0;
  while (prof.values[sw] >= kTailSwitchLevel * prof.amplitude) ++sw;
  prof.switch_radius = prof.step * static_cast<double>(sw);
  prof.tail_coeff =
      prof.values[sw] * std::exp(prof.decay_rate * prof.switch_radius);
  for (std::size_t k = sw; k < n; ++k) {
    const double r = prof.step * static_cast<double>(k);
    prof.values[k] = prof.tail_coeff * std::exp(-prof.decay_rate * r);
    prof.derivs[k] = -prof.decay_rate * prof.values[k];
  }
  return prof;
}

ContinuumProfile shoot_radial_ground_state(int dim, double p, double lambda) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  if (!(p >= 0.5) || !(p < 2.0 / dim))
    throw std::invalid_argument("exponent outside [1/2, 2/dim)");
  if (!(lambda < 0.0)) throw std::invalid_argument("lambda must be negative");

  const double kappa = std::sqrt(-lambda);
  const RadialRhs rhs{dim, p, lambda};

  // Zero-energy amplitude of the 1D mechanical analogue; the true amplitude
  // sits at it (dim 1) or above it (dim 2, where the 1/r term dissipates).
  const double a_zero = std::pow((p + 1.0) * kappa * kappa, 1.0 / (2.0 * p));
  double lo = 0.99 * a_zero;
  int guard = 0;
  while (classify(rhs, lo, kappa) != Shot::rebound) {
    lo *= 0.5;
    if (++guard > 40)
      throw std::runtime_error("shooting: no undershoot amplitude found");
  }
  double hi = 2.0 * a_zero;
  guard = 0;
  while (classify(rhs, hi, kappa) != Shot::cross) {
    hi *= 2.0;
    if (++guard > 40)
      throw std::runtime_error("shooting: no overshoot amplitude found");
  }
  int iter = 0;
  while (hi - lo > 1e-15 * hi) {
    if (++iter > 200) {
      char msg[128];
      std::snprintf(msg, sizeof msg,
                    "shooting bisection stalled, bracket [%.17g, %.17g]", lo,
                    hi);
      throw std::runtime_error(msg);
    }
    const double mid = 0.5 * (lo + hi);
    (classify(rhs, mid, kappa) == Shot::cross ? hi : lo) = mid;
  }
  const double a = 0.5 * (lo + hi);

  ContinuumProfile prof;
  prof.dim = dim;
  prof.p = p;
  prof.lambda_c = lambda;
  prof.decay_rate = kappa;
  prof.amplitude = a;
  prof.step = 1e-3 / kappa;
  const std::size_t n =
      static_cast<std::size_t>(kNodesPerDecayLength * kRangeDecayLengths) + 1;
  prof.values.assign(n, 0.0);
  prof.derivs.assign(n, 0.0);
  prof.values[0] = a;
  prof.derivs[0] = 0.0;

  Dp5 solver(rhs, 1e-15 * a, 1e-12);
  const double r0 = 1e-7 / kappa;
  double psi, dpsi;
  series_start(rhs, a, r0, &psi, &dpsi);
  solver.start(r0, psi, dpsi, 1e-3 / kappa);
  std::size_t sw = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const double target = prof.step * static_cast<double>(k);
    while (solver.r() < target) solver.step(target);
    if (solver.psi() <= 0.0)
      throw std::runtime_error("shooting: table sweep crossed zero");
    prof.values[k] = solver.psi();
    prof.derivs[k] = solver.dpsi();
    if (solver.psi() < kTailSwitchLevel * a) {
      sw = k;
      break;
    }
  }
  if (sw == 0) throw std::runtime_error("shooting: tail switch never reached");
  prof.switch_radius = prof.step * static_cast<double>(sw);
  prof.tail_coeff =
      dim == 1
          ? prof.values[sw] * std::exp(kappa * prof.switch_radius)
          : prof.values[sw] / bessel_k0(kappa * prof.switch_radius);
  for (std::size_t k = sw; k < n; ++k) {
    const double r = prof.step * static_cast<double>(k);
    if (dim == 1) {
      prof.values[k] = prof.tail_coeff * std::exp(-kappa * r);
      prof.derivs[k] = -kappa * prof.values[k];
    } else {
      prof.values[k] = prof.tail_coeff * bessel_k0(kappa * r);
      prof.derivs[k] = -kappa * prof.tail_coeff * bessel_k1(kappa * r);
    }
  }
  return prof;
}

ContinuumProfile rescale_to_unit_mass(const ContinuumProfile& prof) {
  const double mass = continuum_functionals(prof, prof.p).mass;
  if (!(mass > 0.0)) throw std::invalid_argument("zero-mass profile");
  const double expo = 2.0 / prof.p - static_cast<double>(prof.dim);
  const double s = std::pow(mass, -1.0 / expo);
  const double amp_factor = std::pow(s, 1.0 / prof.p);

  ContinuumProfile out;
  out.dim = prof.dim;
  out.p = prof.p;
  out.lambda_c = s * s * prof.lambda_c;
  out.decay_rate = s * prof.decay_rate;
  out.amplitude = amp_factor * prof.amplitude;
  // New node j sits at old radius j*step, so the tables map one-to-one and
  // the step convention 0.001/kappa is preserved.
  out.step = prof.step / s;
  out.values.resize(prof.values.size());
  out.derivs.resize(prof.derivs.size());
  for (std::size_t k = 0; k < prof.values.size(); ++k) {
    out.values[k] = amp_factor * prof.values[k];
    out.derivs[k] = amp_factor * s * prof.derivs[k];
  }
  out.switch_radius = prof.switch_radius / s;
  out.tail_coeff = amp_factor * prof.tail_coeff;
  return out;
}

ContinuumProfile unit_ground_state(int dim, double p) {
  if (dim == 1 && p == 1.0)
    return rescale_to_unit_mass(explicit_ground_state_1d());
  return rescale_to_unit_mass(shoot_radial_ground_state(dim, p, -1.0));
}

namespace {

/** Composite Simpson over the table nodes 0, stride, 2*stride, ... */
double simpson(const std::vector<double>& f, double h, std::size_t stride) {
  const std::size_t intervals = (f.size() - 1) / stride;
  if (intervals * stride != f.size() - 1 || intervals % 2 != 0)
    throw std::logic_error("simpson needs an even interval count");
  std::vector<double> terms;
  terms.reserve(intervals + 1);
  terms.push_back(f[0]);
  for (std::size_t k = 1; k < intervals; ++k)
    terms.push_back(f[k * stride] * (k % 2 == 1 ? 4.0 : 2.0));
  terms.push_back(f[intervals * stride]);
  return pairwise_sum(terms) * h * static_cast<double>(stride) / 3.0;
}

}  // namespace

ContinuumFunctionals continuum_functionals(const ContinuumProfile& prof,
                                           double p) {
  const std::size_t n = prof.values.size();
  std::vector<double> mass_f(n), grad_f(n), pot_f(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = prof.step * static_cast<double>(k);
    const double w = prof.dim == 1 ? 2.0 : 2.0 * std::numbers::pi * r;
    const double v = prof.values[k];
    const double d = prof.derivs[k];
    mass_f[k] = w * v * v;
    grad_f[k] = w * d * d;
    pot_f[k] = w * abs_pow_2p(v, p) * v * v;
  }
  ContinuumFunctionals out;
  out.mass = simpson(mass_f, prof.step, 1);
  out.gradient_energy = simpson(grad_f, prof.step, 1);
  out.potential = simpson(pot_f, prof.step, 1);
  out.hamiltonian = out.gradient_energy - out.potential / (p + 1.0);
  out.quad_error = std::max(
      {std::abs(out.mass - simpson(mass_f, prof.step, 2)),
       std::abs(out.gradient_energy - simpson(grad_f, prof.step, 2)),
       std::abs(out.potential - simpson(pot_f, prof.step, 2))});
  return out;
}

namespace {

// Centered 7-point first-derivative stencil, error O(h^6).
constexpr double kFd7[7] = {-1.0 / 60, 9.0 / 60, -45.0 / 60, 0.0,
                            45.0 / 60, -9.0 / 60, 1.0 / 60};

double fd7_on_derivs(const ContinuumProfile& prof, long k) {
  double acc = 0.0;
  for (long j = -3; j <= 3; ++j) {
    const long idx = k + j;
    const double v = idx < 0 ? -prof.derivs[static_cast<std::size_t>(-idx)]
                             : prof.derivs[static_cast<std::size_t>(idx)];
    acc += kFd7[j + 3] * v;
  }
  return acc / prof.step;
}

double fd7_on_values(const ContinuumProfile& prof, long k) {
  double acc = 0.0;
  for (long j = -3; j <= 3; ++j) {
    const long idx = k + j;
    const double v = idx < 0 ? prof.values[static_cast<std::size_t>(-idx)]
                             : prof.values[static_cast<std::size_t>(idx)];
    acc += kFd7[j + 3] * v;
  }
  return acc / prof.step;
}

}  // namespace

double ode_residual_max(const ContinuumProfile& prof, double p) {
  const long n = static_cast<long>(prof.values.size());
  const long sw = static_cast<long>(std::lround(prof.switch_radius / prof.step));
  double worst = 0.0;
  for (long k = 0; k + 3 < n; ++k) {
    if (std::abs(k - sw) <= 3) continue;  // tables kink at the tail switch
    const double r = prof.step * static_cast<double>(k);
    const double v = prof.values[static_cast<std::size_t>(k)];
    const double d = prof.derivs[static_cast<std::size_t>(k)];
    const double dd = fd7_on_derivs(prof, k);
    double res = dd + abs_pow_2p(v, p) * v + prof.lambda_c * v;
    if (prof.dim == 2) res += k == 0 ? dd : d / r;  // (1/r) psi' -> psi''(0)
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double deriv_consistency_max(const ContinuumProfile& prof) {
  const long n = static_cast<long>(prof.values.size());
  const long sw = static_cast<long>(std::lround(prof.switch_radius / prof.step));
  double worst = 0.0;
  for (long k = 0; k + 3 < n; ++k) {
    if (std::abs(k - sw) <= 3) continue;
    worst = std::max(
        worst, std::abs(fd7_on_values(prof, k) -
                        prof.derivs[static_cast<std::size_t>(k)]));
  }
  return worst;
}

double decay_radius(const ContinuumProfile& prof, double level) {
  if (!(level > 0.0) || !(level < 1.0))
    throw std::invalid_argument("decay level must lie in (0, 1)");
  const double target = level * prof.amplitude;
  double lo = 0.0;
  double hi = prof.r_max();
  int guard = 0;
  while (prof.value(hi) > target) {
    hi *= 2.0;
    if (++guard > 60)
      throw std::runtime_error("decay radius out of representable range");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (prof.value(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace dnls
