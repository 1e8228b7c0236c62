#include "egt/fock_basis.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace egt {

long binomial(int n, int r) {
  if (r < 0 || n < 0 || r > n) return 0;
  if (r > n - r) r = n - r;
  unsigned __int128 acc = 1;
  for (int i = 0; i < r; ++i) {
    acc *= static_cast<unsigned>(n - i);
    acc /= static_cast<unsigned>(i + 1);
    if (acc > static_cast<unsigned __int128>(__INT64_MAX__))
      throw std::overflow_error("binomial(" + std::to_string(n) + "," + std::to_string(r) +
                                ") exceeds 64-bit range");
  }
  return static_cast<long>(acc);
}

state_t ModeTuple::mask() const {
  state_t m = 0;
  for (int j : modes) m |= state_t{1} << (j - 1);
  return m;
}

bool ModeTuple::valid(int l) const {
  int prev = 0;
  for (int j : modes) {
    if (j <= prev || j > l) return false;
    prev = j;
  }
  return true;
}

ModeTuple tuple_from_mask(state_t mask) {
  ModeTuple t;
  while (mask) {
    const int b = std::countr_zero(mask);
    t.modes.push_back(b + 1);
    mask &= mask - 1;
  }
  return t;
}

int ManyBodyBasis::index_of(state_t s) const {
  auto it = index.find(s);
  if (it == index.end()) throw std::out_of_range("state not in basis");
  return it->second;
}

namespace {

// Emit all strictly increasing rank-k tuples over [first, l] in
// lexicographic order, as occupation masks combined with `prefix`.
void emit_tuples(int l, int k, int first, state_t prefix, std::vector<state_t>& out) {
  if (k == 0) {
    out.push_back(prefix);
    return;
  }
  for (int j = first; j <= l - k + 1; ++j)
    emit_tuples(l, k - 1, j + 1, prefix | (state_t{1} << (j - 1)), out);
}

}  // namespace

ManyBodyBasis enumerate_basis(int l, int n, long dimension_cap) {
  if (l < 2 || l > kMaxModes)
    throw std::invalid_argument("mode count l must be in [2, 64], got " + std::to_string(l));
  if (n < 1 || n >= l)
    throw std::invalid_argument("particle count n must satisfy 1 <= n < l, got n=" +
                                std::to_string(n) + ", l=" + std::to_string(l));
  const long dim = binomial(l, n);
  if (dim > dimension_cap)
    throw std::invalid_argument("basis dimension " + std::to_string(dim) +
                                " exceeds cap " + std::to_string(dimension_cap));
  ManyBodyBasis basis;
  basis.l = l;
  basis.n = n;
  basis.states.reserve(dim);
  emit_tuples(l, n, 1, 0, basis.states);
  basis.index.reserve(basis.states.size());
  for (int i = 0; i < static_cast<int>(basis.states.size()); ++i)
    basis.index.emplace(basis.states[i], i);
  return basis;
}

std::vector<ModeTuple> enumerate_kbody_indices(int l, int k) {
  if (l < 1 || l > kMaxModes)
    throw std::invalid_argument("mode count l must be in [1, 64]");
  if (k < 1 || k > l)
    throw std::invalid_argument("rank k must satisfy 1 <= k <= l, got k=" + std::to_string(k));
  std::vector<state_t> masks;
  masks.reserve(binomial(l, k));
  emit_tuples(l, k, 1, 0, masks);
  std::vector<ModeTuple> out;
  out.reserve(masks.size());
  for (state_t m : masks) out.push_back(tuple_from_mask(m));
  return out;
}

KBodyIndexSet make_kbody_index_set(int l, int k) {
  KBodyIndexSet set;
  set.l = l;
  set.k = k;
  set.tuples = enumerate_kbody_indices(l, k);
  set.masks.reserve(set.tuples.size());
  for (int i = 0; i < static_cast<int>(set.tuples.size()); ++i) {
    set.masks.push_back(set.tuples[i].mask());
    set.index.emplace(set.masks.back(), i);
  }
  return set;
}

namespace {

inline bool annihilate_mode(state_t& bits, int j, int& sign) {
  const state_t b = state_t{1} << (j - 1);
  if (!(bits & b)) return false;
  if (std::popcount(bits & (b - 1)) & 1) sign = -sign;
  bits &= ~b;
  return true;
}

inline bool create_mode(state_t& bits, int j, int& sign) {
  const state_t b = state_t{1} << (j - 1);
  if (bits & b) return false;
  if (std::popcount(bits & (b - 1)) & 1) sign = -sign;
  bits |= b;
  return true;
}

}  // namespace

std::optional<PairAction> apply_pair(state_t s, const ModeTuple& create,
                                     const ModeTuple& annihilate, int l) {
  if (create.rank() != annihilate.rank())
    throw std::invalid_argument("create/annihilate tuples must have equal rank");
  if (!create.valid(l) || !annihilate.valid(l))
    throw std::invalid_argument("malformed mode tuple (non-increasing or out of range)");
  state_t bits = s;
  int sign = 1;
  for (int j : annihilate.modes)
    if (!annihilate_mode(bits, j, sign)) return std::nullopt;
  for (int i = create.rank() - 1; i >= 0; --i)
    if (!create_mode(bits, create.modes[i], sign)) return std::nullopt;
  return PairAction{bits, sign};
}

std::vector<std::vector<bool>> structural_adjacency(const ManyBodyBasis& basis, int k) {
  if (k < 1 || k > basis.n)
    throw std::invalid_argument("rank k must satisfy 1 <= k <= n");
  const int dim = static_cast<int>(basis.dim());
  std::vector<std::vector<bool>> adj(dim, std::vector<bool>(dim, false));
  // Two states are coupled iff they share at least n-k occupied modes: the
  // annihilated set is mu minus the shared part, the created set nu minus it.
  for (int mu = 0; mu < dim; ++mu)
    for (int nu = 0; nu < dim; ++nu)
      adj[mu][nu] = std::popcount(basis.states[mu] & basis.states[nu]) >= basis.n - k;
  return adj;
}

}  // namespace egt
