#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace egt {

// Occupation pattern of l fermionic modes: mode j is occupied iff bit (j-1)
// is set, j = 1..l.
using state_t = std::uint64_t;

inline constexpr int kMaxModes = 64;
inline constexpr long kDefaultDimensionCap = 20000;

// Exact binomial coefficient; throws std::overflow_error if the value does
// not fit in a signed 64-bit integer.
long binomial(int n, int r);

// Strictly increasing tuple of 1-based mode labels. Indexes the k-particle
// operator space (and, with rank n, labels many-body basis states).
struct ModeTuple {
  std::vector<int> modes;

  int rank() const { return static_cast<int>(modes.size()); }
  state_t mask() const;
  bool valid(int l) const;  // strictly increasing, all labels within [1, l]

  bool operator==(const ModeTuple& other) const { return modes == other.modes; }
};

ModeTuple tuple_from_mask(state_t mask);

// n-particle basis over l modes, ordered lexicographically by occupied-mode
// tuple. states.front() has modes 1..n occupied, states.back() has modes
// l-n+1..l occupied.
struct ManyBodyBasis {
  int l = 0;
  int n = 0;
  std::vector<state_t> states;
  std::unordered_map<state_t, int> index;

  long dim() const { return static_cast<long>(states.size()); }
  int index_of(state_t s) const;  // throws std::out_of_range if absent
};

ManyBodyBasis enumerate_basis(int l, int n, long dimension_cap = kDefaultDimensionCap);

// All rank-k tuples over 1..l in lexicographic order.
std::vector<ModeTuple> enumerate_kbody_indices(int l, int k);

// Tuple list plus mask lookup, shared read-only by ensemble sampling.
struct KBodyIndexSet {
  int l = 0;
  int k = 0;
  std::vector<ModeTuple> tuples;
  std::vector<state_t> masks;
  std::unordered_map<state_t, int> index;

  long dim() const { return static_cast<long>(tuples.size()); }
};

KBodyIndexSet make_kbody_index_set(int l, int k);

struct PairAction {
  state_t state;
  int sign;  // +1 or -1
};

// Action of psi^dag_create psi_annihilate on a Fock state.
//
// Convention: the annihilation string is applied to the ket in increasing
// mode order (a_{g1} first), the creation string in decreasing mode order
// (a^dag_{ak} first); each elementary operator contributes
// (-1)^{#occupied modes below its label}. Equivalently
// psi_gamma = (psi^dag_gamma)^dag, which makes the k = n embedding reproduce
// the coefficient matrix with a plus sign.
//
// Returns nullopt if the string annihilates the state (empty mode annihilated
// or filled mode created). Throws std::invalid_argument for malformed tuples
// or mismatched ranks.
std::optional<PairAction> apply_pair(state_t s, const ModeTuple& create,
                                     const ModeTuple& annihilate, int l);

// Adjacency of the k-body coupling graph: entry (mu, nu) is true iff some
// operator pair psi^dag_alpha psi_gamma connects the two basis states. Every
// node of the resulting graph has the same off-diagonal degree.
std::vector<std::vector<bool>> structural_adjacency(const ManyBodyBasis& basis, int k);

}  // namespace egt
