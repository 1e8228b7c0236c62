#include "egt/ensemble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace egt {

KBodyCoefficients sample_coefficients(NormalStream& rng, int l, int k) {
  const long dim = binomial(l, k);
  if (dim < 1) throw std::invalid_argument("invalid (l, k) for coefficient sampling");
  KBodyCoefficients coeffs;
  coeffs.l = l;
  coeffs.k = k;
  coeffs.values.resize(dim, dim);
  const double diag_scale = std::sqrt(2.0);
  for (long a = 0; a < dim; ++a)
    for (long g = a; g < dim; ++g) {
      double x = rng.normal();
      if (a == g) x *= diag_scale;
      coeffs.values(a, g) = x;
      coeffs.values(g, a) = x;
    }
  return coeffs;
}

SignedInvolution build_exchange(int l, int m) {
  if (m < 1 || m > l) throw std::invalid_argument("exchange rank m must satisfy 1 <= m <= l");
  const KBodyIndexSet idx = make_kbody_index_set(l, m);
  SignedInvolution inv;
  inv.l = l;
  inv.m = m;
  inv.perm.resize(idx.dim());
  inv.sign.resize(idx.dim());
  // Reversing a strictly decreasing creation string of length m into
  // increasing order always takes m(m-1)/2 transpositions.
  const int reorder_sign = (m * (m - 1) / 2) % 2 ? -1 : 1;
  for (long i = 0; i < idx.dim(); ++i) {
    ModeTuple mapped;
    mapped.modes.reserve(m);
    for (auto it = idx.tuples[i].modes.rbegin(); it != idx.tuples[i].modes.rend(); ++it)
      mapped.modes.push_back(l - *it + 1);
    inv.perm[i] = idx.index.at(mapped.mask());
    inv.sign[i] = reorder_sign;
  }
  return inv;
}

Eigen::MatrixXd involution_matrix(const SignedInvolution& inv) {
  const long dim = inv.dim();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, dim);
  for (long i = 0; i < dim; ++i) s(inv.perm[i], i) = inv.sign[i];
  return s;
}

KBodyCoefficients symmetrize_centro(const KBodyCoefficients& coeffs, const SignedInvolution& jk) {
  if (coeffs.dim() != jk.dim() || coeffs.l != jk.l)
    throw std::invalid_argument("coefficient/involution dimension mismatch");
  KBodyCoefficients out = coeffs;
  const long dim = coeffs.dim();
  for (long a = 0; a < dim; ++a)
    for (long g = 0; g < dim; ++g)
      out.values(a, g) = 0.5 * (coeffs.values(a, g) + jk.sign[a] * jk.sign[g] *
                                                          coeffs.values(jk.perm[a], jk.perm[g]));
  return out;
}

KBodyCoefficients orbit_project(const KBodyCoefficients& coeffs, const SignedInvolution& jk) {
  if (coeffs.dim() != jk.dim() || coeffs.l != jk.l)
    throw std::invalid_argument("coefficient/involution dimension mismatch");
  KBodyCoefficients out = coeffs;
  const long dim = coeffs.dim();
  for (long a = 0; a < dim; ++a)
    for (long g = 0; g < dim; ++g) {
      const long pa = jk.perm[a], pg = jk.perm[g];
      const int jfac = jk.sign[a] * jk.sign[g];
      // Orbit of (a,g) under transposition and the involution; pick the
      // lexicographically smallest representative and copy its value with
      // the sign factor of the group element that reaches it.
      std::array<std::pair<std::pair<long, long>, int>, 4> orbit{{
          {{a, g}, 1},
          {{g, a}, 1},
          {{pa, pg}, jfac},
          {{pg, pa}, jfac},
      }};
      auto best = orbit[0];
      for (const auto& cand : orbit)
        if (cand.first < best.first) best = cand;
      out.values(a, g) = best.second * coeffs.values(best.first.first, best.first.second);
    }
  return out;
}

HamiltonianSample embed_hamiltonian(const KBodyCoefficients& coeffs, const ManyBodyBasis& basis) {
  return embed_hamiltonian(coeffs, basis, make_kbody_index_set(coeffs.l, coeffs.k));
}

HamiltonianSample embed_hamiltonian(const KBodyCoefficients& coeffs, const ManyBodyBasis& basis,
                                    const KBodyIndexSet& kidx) {
  if (coeffs.k > basis.n) throw std::invalid_argument("operator rank k exceeds particle number n");
  if (coeffs.l != basis.l || kidx.l != basis.l || kidx.k != coeffs.k)
    throw std::invalid_argument("coefficient/basis dimension mismatch");
  const int dim = static_cast<int>(basis.dim());
  const long dk = kidx.dim();
  HamiltonianSample sample;
  sample.l = basis.l;
  sample.n = basis.n;
  sample.k = coeffs.k;
  sample.matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (int mu = 0; mu < dim; ++mu) {
    const state_t smu = basis.states[mu];
    for (long g = 0; g < dk; ++g) {
      const state_t gm = kidx.masks[g];
      if ((smu & gm) != gm) continue;
      const state_t rest = smu ^ gm;
      for (long a = 0; a < dk; ++a) {
        if (kidx.masks[a] & rest) continue;
        const auto action = apply_pair(smu, kidx.tuples[a], kidx.tuples[g], basis.l);
        const int nu = basis.index_of(action->state);
        if (nu < mu) continue;  // lower triangle only; mirrored below
        sample.matrix(nu, mu) += action->sign * coeffs.values(a, g);
      }
    }
  }
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = mu + 1; nu < dim; ++nu) sample.matrix(mu, nu) = sample.matrix(nu, mu);
  return sample;
}

HamiltonianSample sample_hamiltonian(std::uint64_t master_seed, std::uint64_t index, int l, int n,
                                     int k, bool centrosymmetric, CentroSampling sampling) {
  const ManyBodyBasis basis = enumerate_basis(l, n);
  const KBodyIndexSet kidx = make_kbody_index_set(l, k);
  const std::uint64_t child = child_seed(master_seed, kCoefficientStream, index);
  NormalStream rng(child);
  KBodyCoefficients v = sample_coefficients(rng, l, k);
  if (centrosymmetric) {
    const SignedInvolution jk = build_exchange(l, k);
    v = sampling == CentroSampling::kAverage ? symmetrize_centro(v, jk) : orbit_project(v, jk);
  }
  HamiltonianSample sample = embed_hamiltonian(v, basis, kidx);
  sample.centrosymmetric = centrosymmetric;
  sample.seed = SeedRecord{master_seed, index, child};
  return sample;
}

double commutator_max_norm(const Eigen::MatrixXd& h, const SignedInvolution& jn) {
  if (h.rows() != jn.dim()) throw std::invalid_argument("matrix/involution dimension mismatch");
  const Eigen::MatrixXd j = involution_matrix(jn);
  return (h * j - j * h).cwiseAbs().maxCoeff();
}

}  // namespace egt
