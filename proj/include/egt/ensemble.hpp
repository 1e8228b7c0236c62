#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "egt/fock_basis.hpp"
#include "egt/rng.hpp"

namespace egt {

// Symmetric Gaussian coefficients v_{alpha,gamma} over the rank-k operator
// space. Off-diagonal entries have variance 1, diagonal entries variance 2.
struct KBodyCoefficients {
  int l = 0;
  int k = 0;
  Eigen::MatrixXd values;  // binomial(l,k) x binomial(l,k), symmetric

  long dim() const { return values.rows(); }
};

// Mode-reversal exchange operator lifted to the m-particle tuple space, as a
// signed involutive permutation: index i maps to perm[i] with factor sign[i].
struct SignedInvolution {
  int l = 0;
  int m = 0;
  std::vector<int> perm;
  std::vector<int> sign;  // +1 or -1

  long dim() const { return static_cast<long>(perm.size()); }
};

enum class CentroSampling { kAverage, kOrbit };

struct SeedRecord {
  std::uint64_t master = 0;
  std::uint64_t index = 0;
  std::uint64_t child = 0;
};

struct HamiltonianSample {
  Eigen::MatrixXd matrix;  // N x N, symmetric
  int l = 0;
  int n = 0;
  int k = 0;
  bool centrosymmetric = false;
  SeedRecord seed;
};

// Draw a fresh symmetric coefficient matrix. The upper triangle is drawn
// row-major (alpha <= gamma), one normal per free entry, diagonal scaled by
// sqrt(2); the draw order is part of the determinism contract.
KBodyCoefficients sample_coefficients(NormalStream& rng, int l, int k);

// Exchange operator on the m-particle tuple space: tuple (j_1,...,j_m) maps
// to (l-j_m+1,...,l-j_1+1). Reordering the reversed creation string into
// canonical increasing order contributes the fermionic sign (-1)^{m(m-1)/2},
// the same for every tuple; it is kept explicitly rather than dropped.
SignedInvolution build_exchange(int l, int m);

// Dense signed permutation matrix of the involution.
Eigen::MatrixXd involution_matrix(const SignedInvolution& inv);

// Projection onto exchange-invariant coefficients by averaging,
// v' = (v + S v S^T)/2. Idempotent; embedding the result commutes with the
// lifted exchange operator on the n-particle space.
KBodyCoefficients symmetrize_centro(const KBodyCoefficients& coeffs, const SignedInvolution& jk);

// Exchange-invariant coefficients by copying: every entry is replaced by the
// value at its orbit's lexicographically smallest representative (with the
// involution's sign factors). Unlike averaging this keeps the full variance
// of each entry.
KBodyCoefficients orbit_project(const KBodyCoefficients& coeffs, const SignedInvolution& jk);

// H[nu,mu] = sum_{alpha,gamma} v_{alpha,gamma} <nu| psi^dag_alpha psi_gamma |mu>.
// The lower triangle is accumulated and mirrored, so the result is symmetric
// to exact representation equality. For k = n the result equals the
// coefficient matrix under the index identification.
HamiltonianSample embed_hamiltonian(const KBodyCoefficients& coeffs, const ManyBodyBasis& basis);
HamiltonianSample embed_hamiltonian(const KBodyCoefficients& coeffs, const ManyBodyBasis& basis,
                                    const KBodyIndexSet& kidx);

// One EGE or csEGE realization. The centrosymmetric sample is derived from
// the identical raw Gaussian draw as the plain sample for the same
// (master_seed, index), which pairs the two ensembles realization by
// realization.
HamiltonianSample sample_hamiltonian(std::uint64_t master_seed, std::uint64_t index, int l, int n,
                                     int k, bool centrosymmetric,
                                     CentroSampling sampling = CentroSampling::kOrbit);

// max |[H, J_n]| over all entries, J_n as signed permutation matrix.
double commutator_max_norm(const Eigen::MatrixXd& h, const SignedInvolution& jn);

}  // namespace egt
