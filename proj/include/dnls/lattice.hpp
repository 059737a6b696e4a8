#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace dnls {

/** Breather symmetry centers: on-site, bond-centered, and the two 2D
 *  face-centered hybrids. The offset gives the center shift per axis in
 *  units of the mesh. */
enum class Mode { ST, P, Hx, Hy };

struct ModeSpec {
  int dim;
  Mode label;
  std::array<double, 2> offset;  // entries are 0 or 0.5; offset[1] unused in 1D

  static ModeSpec make(Mode label, int dim);
  /** Parses "ST", "P", "Hx", "Hy" (case-insensitive). Throws on an unknown
   *  name or a mode invalid for the dimension. */
  static ModeSpec parse(const std::string& name, int dim);
  const char* name() const;
  /** Reflected index along one axis: i -> -i (on-site) or i -> -i-1
   *  (half-offset), so the physical sampling points mirror about 0. */
  int reflect_index(int axis, int i) const;
};

/** Real scalar field on the truncated lattice {-K..K}^dim with mesh mu > 0
 *  and zero (Dirichlet) values outside the box. Storage is row-major with
 *  the first index outermost. */
class LatticeField {
 public:
  LatticeField(int dim, double mesh, int radius);
  LatticeField(int dim, double mesh, int radius, std::vector<double> values);

  int dim() const { return dim_; }
  double mesh() const { return mesh_; }
  int radius() const { return radius_; }
  int extent() const { return 2 * radius_ + 1; }  // sites per axis
  std::size_t size() const { return values_.size(); }

  /** In-range accessors; indices in [-K, K]. */
  double& at(int i);
  double& at(int i, int j);
  double at(int i) const;
  double at(int i, int j) const;
  /** Zero-extended read: any integer index is valid. */
  double value_or_zero(int i, int j = 0) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_shape(const LatticeField& other) const;

 private:
  int dim_;
  double mesh_;
  int radius_;
  std::vector<double> values_;
};

/** Deterministic pairwise-tree sum; fixed association independent of any
 *  threading, accuracy O(log n) ulps. */
double pairwise_sum(const double* data, std::size_t n);
double pairwise_sum(const std::vector<double>& data);

/** |v|^(2p), with exact fast paths for p = 1/2 and p = 1. */
double abs_pow_2p(double v, double p);

/** Nearest-neighbour Laplacian (Delta_1 f)_l = sum_axes f_{l+e} + f_{l-e} - 2 f_l
 *  with Dirichlet truncation. */
LatticeField discrete_laplacian(const LatticeField& f);

/** Dirichlet form sum over lattice bonds of (f_j - f_l)^2, one term per
 *  unordered bond, including the bonds that connect the boundary ring to the
 *  zero exterior. Equals <f, -Delta_1 f> exactly. */
double bond_energy(const LatticeField& f);

/** H_d(f) = mu^n [ bond_energy/mu^2 - sum |f|^(2p+2)/(p+1) ].
 *  Requires 1/2 <= p < 2/dim. */
double hamiltonian_d(const LatticeField& f, double p);

/** N_d(f) = mu^n sum f^2. */
double norm_d(const LatticeField& f);

/** Euclidean gradient of H_d: 2 mu^n (-mu^-2 Delta_1 f - |f|^(2p) f). */
LatticeField grad_hamiltonian_d(const LatticeField& f, double p);

/** Euclidean gradient of N_d: 2 mu^n f. */
LatticeField grad_norm_d(const LatticeField& f);

/** Lattice H^1-type norm: sqrt(mu^n |f|_l2^2 + mu^(n-2) <f, -Delta_1 f>). */
double qmu_norm(const LatticeField& f);

double sup_norm(const LatticeField& f);

/** Plain l2 inner product of the value arrays. */
double dot(const LatticeField& a, const LatticeField& b);

/** Pure reflection about the mode center; sites whose mirror image falls
 *  outside the box read as zero. */
LatticeField reflect(const LatticeField& f, const ModeSpec& mode);

/** Orthogonal projection onto the mode-symmetric subspace: averages each
 *  reflection orbit and zeroes sites whose orbit leaves the box (only the
 *  i = K plane of a half-offset axis). Idempotent. */
LatticeField symmetrize(const LatticeField& f, const ModeSpec& mode);

/** Max deviation |f - symmetrize(f)|. */
double symmetry_defect(const LatticeField& f, const ModeSpec& mode);

/** Sup norm over the sites the symmetry class leaves free.  The pinned
 *  plane of a half-offset axis is a boundary site of the restricted
 *  problem, so it is excluded; for on-site modes this equals sup_norm. */
double restricted_sup_norm(const LatticeField& f, const ModeSpec& mode);

}  // namespace dnls
