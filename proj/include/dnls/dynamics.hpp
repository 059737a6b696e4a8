#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls {

/** Complex field on the same Dirichlet box layout as LatticeField. */
class ComplexLatticeState {
 public:
  ComplexLatticeState(int dim, double mesh, int radius);
  /** Real initial data, time 0. */
  explicit ComplexLatticeState(const LatticeField& f);

  int dim() const { return dim_; }
  double mesh() const { return mesh_; }
  int radius() const { return radius_; }
  int extent() const { return 2 * radius_ + 1; }
  std::size_t size() const { return values_.size(); }

  std::complex<double>& at(int i) {
    return values_[static_cast<std::size_t>(i + radius_)];
  }
  std::complex<double> at(int i) const {
    return values_[static_cast<std::size_t>(i + radius_)];
  }
  std::complex<double>& at(int i, int j) {
    return values_[static_cast<std::size_t>(i + radius_) *
                       static_cast<std::size_t>(extent()) +
                   static_cast<std::size_t>(j + radius_)];
  }
  std::complex<double> at(int i, int j) const {
    return values_[static_cast<std::size_t>(i + radius_) *
                       static_cast<std::size_t>(extent()) +
                   static_cast<std::size_t>(j + radius_)];
  }

  std::vector<std::complex<double>>& values() { return values_; }
  const std::vector<std::complex<double>>& values() const { return values_; }

  double time = 0.0;

 private:
  int dim_;
  double mesh_;
  int radius_;
  std::vector<std::complex<double>> values_;
};

/** mesh^dim sum |z|^2. */
double norm_d(const ComplexLatticeState& s);

/** mesh^dim [bond sum |dz|^2 / mesh^2 - sum |z|^(2p+2)/(p+1)]. */
double hamiltonian_d(const ComplexLatticeState& s, double p);

/** Bond part of the energy alone (the quadratic piece). */
double quadratic_energy(const ComplexLatticeState& s);

struct EvolveControls {
  // Up to this many sites the linear flow uses the dense spectral
  // propagator; above it a Lanczos-Krylov exponential (tolerance 1e-13).
  int spectral_limit = 10000;
  // Disable to run the linear flow alone.
  bool nonlinear = true;
};

/** Strang splitting for i dz/dt = -mesh^-2 Lap z - |z|^2p z:
 *  half-step exact phase rotation, exact linear exponential, half-step
 *  phase.  Global error O(dt^2); both split flows preserve norm_d. */
ComplexLatticeState evolve(const ComplexLatticeState& start, double p,
                           double total_time, double dt);
ComplexLatticeState evolve(const ComplexLatticeState& start, double p,
                           double total_time, double dt,
                           const EvolveControls& controls);

/** {|norm_d end - start|, |hamiltonian_d end - start|}. */
std::pair<double, double> conserved_drift(const ComplexLatticeState& start,
                                          const ComplexLatticeState& end,
                                          double p);

/** Max-norm distance between two states of the same shape. */
double max_state_difference(const ComplexLatticeState& a,
                            const ComplexLatticeState& b);

}  // namespace dnls
