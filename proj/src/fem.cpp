#include "dnls/fem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dnls {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/** Snap a grid coordinate that is within rounding distance of a node onto
 *  the node, so node evaluation is exact. */
double snap(double t) {
  const double tr = std::round(t);
  return std::abs(t - tr) <= 32.0 * kEps * (1.0 + std::abs(tr)) ? tr : t;
}

double pow_abs(double v, double expo) { return std::pow(std::abs(v), expo); }

// Gauss-Legendre order 8 on [0, 1].
constexpr double kGauss8X[8] = {
    0.5 - 0.4801449282487682 /*0.9602898564975363/2*/,
    0.5 - 0.3983332387068134, 0.5 - 0.2627662049581645,
    0.5 - 0.0917173212478249, 0.5 + 0.0917173212478249,
    0.5 + 0.2627662049581645, 0.5 + 0.3983332387068134,
    0.5 + 0.4801449282487682};
constexpr double kGauss8W[8] = {
    0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
    0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
    0.1111905172266872, 0.0506142681451881};

// Degree-5 seven-point triangle rule, barycentric points and unit weights.
constexpr double kTri7A[7] = {1.0 / 3,
                              0.0597158717897698,
                              0.4701420641051151,
                              0.4701420641051151,
                              0.7974269853530873,
                              0.1012865073234563,
                              0.1012865073234563};
constexpr double kTri7B[7] = {1.0 / 3,
                              0.4701420641051151,
                              0.0597158717897698,
                              0.4701420641051151,
                              0.1012865073234563,
                              0.7974269853530873,
                              0.1012865073234563};
constexpr double kTri7W[7] = {0.225,
                              0.1323941527885062,
                              0.1323941527885062,
                              0.1323941527885062,
                              0.1259391805448271,
                              0.1259391805448271,
                              0.1259391805448271};

/** Integral over [0,1] of |a + (b-a) t|^expo by Gauss with interval
 *  bisection; the kink at a sign change drives the refinement. */
double segment_power_integral(double a, double b, double expo, int depth) {
  auto gauss = [&](double lo_v, double hi_v) {
    double acc = 0.0;
    for (int i = 0; i < 8; ++i)
      acc += kGauss8W[i] * pow_abs(lo_v + (hi_v - lo_v) * kGauss8X[i], expo);
    return acc;
  };
  const double mid = 0.5 * (a + b);
  const double whole = gauss(a, b);
  const double halves = 0.5 * (gauss(a, mid) + gauss(mid, b));
  if (std::abs(whole - halves) <=
          1e-13 * (std::abs(halves) + pow_abs(a, expo) + pow_abs(b, expo)) ||
      depth >= 24)
    return halves;
  return 0.5 * (segment_power_integral(a, mid, expo, depth + 1) +
                segment_power_integral(mid, b, expo, depth + 1));
}

/** Same for a triangle with affine integrand given by vertex values;
 *  refinement splits into four midpoint children. Result is per unit area. */
double triangle_power_integral(double a, double b, double c, double expo,
                               int depth) {
  auto rule = [&](double va, double vb, double vc) {
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) {
      const double l1 = kTri7A[i];
      const double l2 = kTri7B[i];
      const double v = va * (1.0 - l1 - l2) + vb * l1 + vc * l2;
      acc += kTri7W[i] * pow_abs(v, expo);
    }
    return acc;
  };
  const double ab = 0.5 * (a + b);
  const double bc = 0.5 * (b + c);
  const double ca = 0.5 * (c + a);
  const double whole = rule(a, b, c);
  const double kids = 0.25 * (rule(a, ab, ca) + rule(ab, b, bc) +
                              rule(ca, bc, c) + rule(ab, bc, ca));
  if (std::abs(whole - kids) <=
          1e-13 * (std::abs(kids) + pow_abs(a, expo) + pow_abs(b, expo) +
                   pow_abs(c, expo)) ||
      depth >= 16)
    return kids;
  return 0.25 * (triangle_power_integral(a, ab, ca, expo, depth + 1) +
                 triangle_power_integral(ab, b, bc, expo, depth + 1) +
                 triangle_power_integral(ca, bc, c, expo, depth + 1) +
                 triangle_power_integral(ab, bc, ca, expo, depth + 1));
}

}  // namespace

FemFunction::FemFunction(LatticeField b, std::array<double, 2> off)
    : base(std::move(b)), offset(off) {
  for (int axis = 0; axis < base.dim(); ++axis)
    if (offset[static_cast<std::size_t>(axis)] != 0.0 &&
        offset[static_cast<std::size_t>(axis)] != 0.5)
      throw std::invalid_argument("basis offset must be 0 or 1/2");
}

FemFunction::FemFunction(LatticeField b, const ModeSpec& mode)
    : FemFunction(std::move(b), mode.offset) {
  if (mode.dim != base.dim())
    throw std::invalid_argument("mode dimension mismatch");
}

double FemFunction::evaluate(double x) const {
  if (base.dim() != 1) throw std::invalid_argument("expected a 1D field");
  const int radius = base.radius();
  const double t = snap(x / base.mesh() - offset[0]);
  if (t <= -(radius + 1.0) || t >= radius + 1.0) return 0.0;
  const double fj = std::floor(t);
  const int j = static_cast<int>(fj);
  const double xi = t - fj;
  const double a = base.value_or_zero(j);
  const double b = base.value_or_zero(j + 1);
  return a + xi * (b - a);
}

double FemFunction::evaluate(double x, double y) const {
  if (base.dim() != 2) throw std::invalid_argument("expected a 2D field");
  const int radius = base.radius();
  const double tx = snap(x / base.mesh() - offset[0]);
  const double ty = snap(y / base.mesh() - offset[1]);
  if (tx <= -(radius + 1.0) || tx >= radius + 1.0) return 0.0;
  if (ty <= -(radius + 1.0) || ty >= radius + 1.0) return 0.0;
  const double fj = std::floor(tx);
  const double fk = std::floor(ty);
  const int j = static_cast<int>(fj);
  const int k = static_cast<int>(fk);
  const double xi = tx - fj;
  const double eta = ty - fk;
  if (xi + eta <= 1.0) {
    const double a = base.value_or_zero(j, k);
    return a + xi * (base.value_or_zero(j + 1, k) - a) +
           eta * (base.value_or_zero(j, k + 1) - a);
  }
  const double d = base.value_or_zero(j + 1, k + 1);
  return d + (1.0 - xi) * (base.value_or_zero(j, k + 1) - d) +
         (1.0 - eta) * (base.value_or_zero(j + 1, k) - d);
}

double gradient_energy(const FemFunction& f) {
  const double mu = f.base.mesh();
  const double scale = f.base.dim() == 1 ? 1.0 / mu : 1.0;
  return scale * bond_energy(f.base);
}

GradientIntegrals gradient_integrals(const FemFunction& f) {
  const LatticeField& u = f.base;
  const int radius = u.radius();
  GradientIntegrals out{0.0, 0.0, 0.0};
  if (u.dim() == 1) {
    // Per cell the slope is constant: (b-a)/mu over length mu.
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(2 * radius) + 2);
    for (int j = -radius - 1; j <= radius; ++j) {
      const double d = u.value_or_zero(j + 1) - u.value_or_zero(j);
      terms.push_back(d * d);
    }
    out.xx = pairwise_sum(terms) / u.mesh();
    return out;
  }
  // Each triangle has constant gradient; area mu^2/2 times 1/mu^2 leaves 1/2.
  std::vector<double> xx, yy, xy;
  const std::size_t cells =
      static_cast<std::size_t>(2 * radius + 2) *
      static_cast<std::size_t>(2 * radius + 2);
  xx.reserve(cells);
  yy.reserve(cells);
  xy.reserve(cells);
  for (int j = -radius - 1; j <= radius; ++j) {
    for (int k = -radius - 1; k <= radius; ++k) {
      const double a = u.value_or_zero(j, k);
      const double b = u.value_or_zero(j + 1, k);
      const double c = u.value_or_zero(j, k + 1);
      const double d = u.value_or_zero(j + 1, k + 1);
      const double gx_lo = b - a, gy_lo = c - a;   // lower-left triangle
      const double gx_hi = d - c, gy_hi = d - b;   // upper-right triangle
      xx.push_back(0.5 * (gx_lo * gx_lo + gx_hi * gx_hi));
      yy.push_back(0.5 * (gy_lo * gy_lo + gy_hi * gy_hi));
      xy.push_back(0.5 * (gx_lo * gy_lo + gx_hi * gy_hi));
    }
  }
  out.xx = pairwise_sum(xx);
  out.yy = pairwise_sum(yy);
  out.xy = pairwise_sum(xy);
  return out;
}

double l2_integral(const FemFunction& f) {
  const LatticeField& u = f.base;
  const int radius = u.radius();
  const double mu = u.mesh();
  std::vector<double> terms;
  if (u.dim() == 1) {
    terms.reserve(static_cast<std::size_t>(2 * radius) + 2);
    for (int j = -radius - 1; j <= radius; ++j) {
      const double a = u.value_or_zero(j);
      const double b = u.value_or_zero(j + 1);
      terms.push_back(a * a + a * b + b * b);  // 3/mu times the cell integral
    }
    return pairwise_sum(terms) * mu / 3.0;
  }
  terms.reserve(static_cast<std::size_t>(2 * radius + 2) *
                static_cast<std::size_t>(2 * radius + 2));
  for (int j = -radius - 1; j <= radius; ++j) {
    for (int k = -radius - 1; k <= radius; ++k) {
      const double a = u.value_or_zero(j, k);
      const double b = u.value_or_zero(j + 1, k);
      const double c = u.value_or_zero(j, k + 1);
      const double d = u.value_or_zero(j + 1, k + 1);
      // (area/6)(sum of squares + sum of products) per triangle.
      terms.push_back(a * a + b * b + c * c + a * b + a * c + b * c +
                      (d * d + c * c + b * b + d * c + d * b + c * b));
    }
  }
  return pairwise_sum(terms) * mu * mu / 12.0;
}

IdentityCheck l2_mass_identity_check(const FemFunction& f) {
  const double mu = f.base.mesh();
  const GradientIntegrals g = gradient_integrals(f);
  const double correction =
      f.base.dim() == 1 ? g.xx : g.xx + g.yy - g.xy;
  return {norm_d(f.base), l2_integral(f) + mu * mu / 6.0 * correction};
}

LatticeField project(const ContinuumProfile& prof, double mesh, int radius,
                     const ModeSpec& mode) {
  if (mode.dim != prof.dim)
    throw std::invalid_argument("mode dimension mismatch");
  LatticeField out(prof.dim, mesh, radius);
  if (prof.dim == 1) {
    for (int j = -radius; j <= radius; ++j)
      out.at(j) = prof.value(mesh * (j + mode.offset[0]));
  } else {
    for (int j = -radius; j <= radius; ++j) {
      const double x = mesh * (j + mode.offset[0]);
      for (int k = -radius; k <= radius; ++k) {
        const double y = mesh * (k + mode.offset[1]);
        out.at(j, k) = prof.value(std::hypot(x, y));
      }
    }
  }
  return out;
}

LatticeField project(const std::function<double(double, double)>& fn, int dim,
                     double mesh, int radius, const ModeSpec& mode) {
  LatticeField out(dim, mesh, radius);
  if (dim == 1) {
    for (int j = -radius; j <= radius; ++j)
      out.at(j) = fn(mesh * (j + mode.offset[0]), 0.0);
  } else {
    for (int j = -radius; j <= radius; ++j)
      for (int k = -radius; k <= radius; ++k)
        out.at(j, k) =
            fn(mesh * (j + mode.offset[0]), mesh * (k + mode.offset[1]));
  }
  return out;
}

LatticeField project(const FemFunction& f, double mesh, int radius,
                     const ModeSpec& mode) {
  LatticeField out(f.base.dim(), mesh, radius);
  if (f.base.dim() == 1) {
    for (int j = -radius; j <= radius; ++j)
      out.at(j) = f.evaluate(mesh * (j + mode.offset[0]));
  } else {
    for (int j = -radius; j <= radius; ++j)
      for (int k = -radius; k <= radius; ++k)
        out.at(j, k) = f.evaluate(mesh * (j + mode.offset[0]),
                                  mesh * (k + mode.offset[1]));
  }
  return out;
}

double euler_maclaurin_residual(const FemFunction& f, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("exponent must satisfy q >= 1");
  const LatticeField& u = f.base;
  const int radius = u.radius();
  const double mu = u.mesh();
  const double expo = q + 2.0;

  std::vector<double> cell_terms;
  if (u.dim() == 1) {
    cell_terms.reserve(static_cast<std::size_t>(2 * radius) + 2);
    for (int j = -radius - 1; j <= radius; ++j)
      cell_terms.push_back(mu * segment_power_integral(
                                    u.value_or_zero(j), u.value_or_zero(j + 1),
                                    expo, 0));
  } else {
    cell_terms.reserve(static_cast<std::size_t>(2 * radius + 2) *
                       static_cast<std::size_t>(2 * radius + 2));
    const double area = 0.5 * mu * mu;
    for (int j = -radius - 1; j <= radius; ++j)
      for (int k = -radius - 1; k <= radius; ++k) {
        const double a = u.value_or_zero(j, k);
        const double b = u.value_or_zero(j + 1, k);
        const double c = u.value_or_zero(j, k + 1);
        const double d = u.value_or_zero(j + 1, k + 1);
        cell_terms.push_back(
            area * (triangle_power_integral(a, b, c, expo, 0) +
                    triangle_power_integral(d, c, b, expo, 0)));
      }
  }
  const double integral = pairwise_sum(cell_terms);

  std::vector<double> site_terms(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    site_terms[i] = pow_abs(u.values()[i], expo);
  const double cell = u.dim() == 1 ? mu : mu * mu;
  return integral - cell * pairwise_sum(site_terms);
}

double h1_error_1d(const FemFunction& f, const ContinuumProfile& prof) {
  if (f.base.dim() != 1) throw std::invalid_argument("expected a 1D field");
  const int radius = f.base.radius();
  const double mu = f.base.mesh();
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(2 * radius) + 2);
  auto sgn = [](double x) { return x < 0.0 ? -1.0 : 1.0; };
  for (int j = -radius - 1; j <= radius; ++j) {
    const double a = f.base.value_or_zero(j);
    const double b = f.base.value_or_zero(j + 1);
    const double x0 = mu * (j + f.offset[0]);
    const double slope = (b - a) / mu;
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
      const double x = x0 + mu * kGauss8X[i];
      const double dv = a + (b - a) * kGauss8X[i] - prof.value(x);
      const double dg = slope - sgn(x) * prof.derivative(x);
      acc += kGauss8W[i] * (dv * dv + dg * dg);
    }
    terms.push_back(mu * acc);
  }
  return std::sqrt(pairwise_sum(terms));
}

}  // namespace dnls
