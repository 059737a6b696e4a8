#include "dnls/lattice.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace dnls {

namespace {

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

ModeSpec ModeSpec::make(Mode label, int dim) {
  check_dim(dim);
  ModeSpec m{dim, label, {0.0, 0.0}};
  switch (label) {
    case Mode::ST:
      break;
    case Mode::P:
      m.offset[0] = 0.5;
      if (dim == 2) m.offset[1] = 0.5;
      break;
    case Mode::Hx:
      if (dim != 2) throw std::invalid_argument("mode Hx requires dim 2");
      m.offset[0] = 0.5;
      break;
    case Mode::Hy:
      if (dim != 2) throw std::invalid_argument("mode Hy requires dim 2");
      m.offset[1] = 0.5;
      break;
  }
  return m;
}

ModeSpec ModeSpec::parse(const std::string& name, int dim) {
  const std::string s = lower(name);
  if (s == "st") return make(Mode::ST, dim);
  if (s == "p") return make(Mode::P, dim);
  if (s == "hx") return make(Mode::Hx, dim);
  if (s == "hy") return make(Mode::Hy, dim);
  throw std::invalid_argument("unknown mode '" + name + "'");
}

const char* ModeSpec::name() const {
  switch (label) {
    case Mode::ST: return "ST";
    case Mode::P: return "P";
    case Mode::Hx: return "Hx";
    case Mode::Hy: return "Hy";
  }
  return "?";
}

int ModeSpec::reflect_index(int axis, int i) const {
  return offset[static_cast<std::size_t>(axis)] == 0.0 ? -i : -i - 1;
}

LatticeField::LatticeField(int dim, double mesh, int radius)
    : dim_(dim), mesh_(mesh), radius_(radius) {
  check_dim(dim);
  if (!(mesh > 0.0)) throw std::invalid_argument("mesh must be positive");
  if (radius < 0) throw std::invalid_argument("radius must be nonnegative");
  const std::size_t n = static_cast<std::size_t>(extent());
  values_.assign(dim == 1 ? n : n * n, 0.0);
}

LatticeField::LatticeField(int dim, double mesh, int radius,
                           std::vector<double> values)
    : LatticeField(dim, mesh, radius) {
  if (values.size() != values_.size())
    throw std::invalid_argument("value count does not match lattice size");
  values_ = std::move(values);
}

double& LatticeField::at(int i) {
  return values_[static_cast<std::size_t>(i + radius_)];
}

double& LatticeField::at(int i, int j) {
  return values_[static_cast<std::size_t>(i + radius_) *
                     static_cast<std::size_t>(extent()) +
                 static_cast<std::size_t>(j + radius_)];
}

double LatticeField::at(int i) const {
  return values_[static_cast<std::size_t>(i + radius_)];
}

double LatticeField::at(int i, int j) const {
  return values_[static_cast<std::size_t>(i + radius_) *
                     static_cast<std::size_t>(extent()) +
                 static_cast<std::size_t>(j + radius_)];
}

double LatticeField::value_or_zero(int i, int j) const {
  if (i < -radius_ || i > radius_) return 0.0;
  if (dim_ == 2 && (j < -radius_ || j > radius_)) return 0.0;
  return dim_ == 1 ? at(i) : at(i, j);
}

bool LatticeField::same_shape(const LatticeField& other) const {
  return dim_ == other.dim_ && mesh_ == other.mesh_ &&
         radius_ == other.radius_;
}

double pairwise_sum(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += data[k];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const std::vector<double>& data) {
  return pairwise_sum(data.data(), data.size());
}

double abs_pow_2p(double v, double p) {
  if (p == 1.0) return v * v;
  if (p == 0.5) return std::abs(v);
  return std::pow(std::abs(v), 2.0 * p);
}

LatticeField discrete_laplacian(const LatticeField& f) {
  LatticeField out(f.dim(), f.mesh(), f.radius());
  const int ext = f.extent();
  const double* v = f.values().data();
  double* o = out.values().data();
  if (f.dim() == 1) {
    for (int a = 0; a < ext; ++a) {
      const double left = a > 0 ? v[a - 1] : 0.0;
      const double right = a + 1 < ext ? v[a + 1] : 0.0;
      o[a] = left + right - 2.0 * v[a];
    }
  } else {
    for (int a = 0; a < ext; ++a) {
      const std::size_t row = static_cast<std::size_t>(a) * ext;
      for (int b = 0; b < ext; ++b) {
        const std::size_t c = row + b;
        double s = -4.0 * v[c];
        if (a > 0) s += v[c - static_cast<std::size_t>(ext)];
        if (a + 1 < ext) s += v[c + static_cast<std::size_t>(ext)];
        if (b > 0) s += v[c - 1];
        if (b + 1 < ext) s += v[c + 1];
        o[c] = s;
      }
    }
  }
  return out;
}

double bond_energy(const LatticeField& f) {
  const int ext = f.extent();
  const double* v = f.values().data();
  std::vector<double> terms;
  if (f.dim() == 1) {
    terms.reserve(static_cast<std::size_t>(ext) + 1);
    // Bonds at -K-1..K-1 join consecutive sites; the two outermost bonds
    // join the boundary to the zero exterior.
    terms.push_back(v[0] * v[0]);
    for (int a = 0; a + 1 < ext; ++a) {
      const double d = v[a + 1] - v[a];
      terms.push_back(d * d);
    }
    terms.push_back(v[ext - 1] * v[ext - 1]);
  } else {
    terms.reserve(2 * static_cast<std::size_t>(ext) *
                  (static_cast<std::size_t>(ext) + 1));
    for (int a = 0; a < ext; ++a) {
      const std::size_t row = static_cast<std::size_t>(a) * ext;
      // Bonds along the second axis within this row.
      terms.push_back(v[row] * v[row]);
      for (int b = 0; b + 1 < ext; ++b) {
        const double d = v[row + b + 1] - v[row + b];
        terms.push_back(d * d);
      }
      terms.push_back(v[row + ext - 1] * v[row + ext - 1]);
      // Bonds along the first axis, between this row and the next.
      for (int b = 0; b < ext; ++b) {
        const double lo = v[row + b];
        const double hi = a + 1 < ext
                              ? v[row + static_cast<std::size_t>(ext) + b]
                              : 0.0;
        const double d = hi - lo;
        terms.push_back(d * d);
      }
      if (a == 0)
        for (int b = 0; b < ext; ++b) terms.push_back(v[b] * v[b]);
    }
  }
  return pairwise_sum(terms);
}

double hamiltonian_d(const LatticeField& f, double p) {
  const double mu = f.mesh();
  const double cell = f.dim() == 1 ? mu : mu * mu;
  const double* v = f.values().data();
  std::vector<double> pot(f.size());
  for (std::size_t k = 0; k < f.size(); ++k)
    pot[k] = abs_pow_2p(v[k], p) * v[k] * v[k];
  return cell * (bond_energy(f) / (mu * mu) - pairwise_sum(pot) / (p + 1.0));
}

double norm_d(const LatticeField& f) {
  const double mu = f.mesh();
  const double cell = f.dim() == 1 ? mu : mu * mu;
  const double* v = f.values().data();
  std::vector<double> sq(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) sq[k] = v[k] * v[k];
  return cell * pairwise_sum(sq);
}

LatticeField grad_hamiltonian_d(const LatticeField& f, double p) {
  const double mu = f.mesh();
  const double cell = f.dim() == 1 ? mu : mu * mu;
  LatticeField lap = discrete_laplacian(f);
  LatticeField out(f.dim(), f.mesh(), f.radius());
  const double* v = f.values().data();
  const double* l = lap.values().data();
  double* o = out.values().data();
  const double inv_mu2 = 1.0 / (mu * mu);
  for (std::size_t k = 0; k < f.size(); ++k)
    o[k] = 2.0 * cell * (-inv_mu2 * l[k] - abs_pow_2p(v[k], p) * v[k]);
  return out;
}

LatticeField grad_norm_d(const LatticeField& f) {
  const double mu = f.mesh();
  const double cell = f.dim() == 1 ? mu : mu * mu;
  LatticeField out(f.dim(), f.mesh(), f.radius());
  const double* v = f.values().data();
  double* o = out.values().data();
  for (std::size_t k = 0; k < f.size(); ++k) o[k] = 2.0 * cell * v[k];
  return out;
}

double qmu_norm(const LatticeField& f) {
  const double mu = f.mesh();
  const double cell = f.dim() == 1 ? mu : mu * mu;
  const double* v = f.values().data();
  std::vector<double> sq(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) sq[k] = v[k] * v[k];
  return std::sqrt(cell * pairwise_sum(sq) +
                   cell / (mu * mu) * bond_energy(f));
}

double sup_norm(const LatticeField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double dot(const LatticeField& a, const LatticeField& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("shape mismatch in dot");
  std::vector<double> prod(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    prod[k] = a.values()[k] * b.values()[k];
  return pairwise_sum(prod);
}

LatticeField reflect(const LatticeField& f, const ModeSpec& mode) {
  if (mode.dim != f.dim())
    throw std::invalid_argument("mode dimension mismatch");
  const int K = f.radius();
  LatticeField out(f.dim(), f.mesh(), f.radius());
  if (f.dim() == 1) {
    for (int i = -K; i <= K; ++i)
      out.at(i) = f.value_or_zero(mode.reflect_index(0, i));
  } else {
    for (int i = -K; i <= K; ++i)
      for (int j = -K; j <= K; ++j)
        out.at(i, j) = f.value_or_zero(mode.reflect_index(0, i),
                                       mode.reflect_index(1, j));
  }
  return out;
}

namespace {

/** One-axis symmetrization: pair-average along the given axis, zeroing the
 *  i = K plane when the axis reflection is half-offset (its mirror -K-1 lies
 *  outside the box). Orthogonal projection per axis; axes commute. */
void symmetrize_axis(LatticeField& f, const ModeSpec& mode, int axis) {
  const int K = f.radius();
  auto fold = [&](auto&& get) {
    for (int i = -K; i <= K; ++i) {
      const int r = mode.reflect_index(axis, i);
      if (r < -K || r > K) {
        get(i) = 0.0;  // mirror site lies outside the box
        continue;
      }
      if (r <= i) continue;  // orbit already handled (or fixed point)
      const double avg = 0.5 * (get(i) + get(r));
      get(i) = avg;
      get(r) = avg;
    }
  };
  if (f.dim() == 1) {
    fold([&](int i) -> double& { return f.at(i); });
  } else {
    for (int t = -K; t <= K; ++t) {
      if (axis == 0)
        fold([&](int i) -> double& { return f.at(i, t); });
      else
        fold([&](int i) -> double& { return f.at(t, i); });
    }
  }
}

}  // namespace

LatticeField symmetrize(const LatticeField& f, const ModeSpec& mode) {
  if (mode.dim != f.dim())
    throw std::invalid_argument("mode dimension mismatch");
  LatticeField out = f;
  for (int axis = 0; axis < f.dim(); ++axis) symmetrize_axis(out, mode, axis);
  return out;
}

double symmetry_defect(const LatticeField& f, const ModeSpec& mode) {
  LatticeField s = symmetrize(f, mode);
  double m = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k)
    m = std::max(m, std::abs(f.values()[k] - s.values()[k]));
  return m;
}

double restricted_sup_norm(const LatticeField& f, const ModeSpec& mode) {
  if (mode.dim != f.dim())
    throw std::invalid_argument("mode dimension mismatch");
  const int box = f.radius();
  auto inside = [&](int axis, int i) {
    const int r = mode.reflect_index(axis, i);
    return r >= -box && r <= box;
  };
  double m = 0.0;
  if (f.dim() == 1) {
    for (int i = -box; i <= box; ++i)
      if (inside(0, i)) m = std::max(m, std::abs(f.at(i)));
  } else {
    for (int i = -box; i <= box; ++i) {
      if (!inside(0, i)) continue;
      for (int j = -box; j <= box; ++j)
        if (inside(1, j)) m = std::max(m, std::abs(f.at(i, j)));
    }
  }
  return m;
}

}  // namespace dnls
