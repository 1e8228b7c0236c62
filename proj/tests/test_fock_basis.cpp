#include <doctest.h>

#include <bit>
#include <random>

#include "egt/fock_basis.hpp"
#include "egt/fock_oracle.hpp"

using namespace egt;

namespace {

// Reference action of psi^dag_create psi_annihilate on a Fock state, via the
// dense Kronecker-product matrices applied to a unit vector. Shares no code
// with the bit-twiddling path under test.
std::optional<PairAction> reference_apply(state_t s, const ModeTuple& create,
                                          const ModeTuple& annihilate, int l) {
  const long full = 1L << l;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(full);
  v(static_cast<long>(s)) = 1.0;
  // psi_gamma = a_{g_k}...a_{g_1}: the factor acting on the ket first is
  // a_{g_1}, then upward; the creation string acts downward afterwards.
  for (int j : annihilate.modes) v = oracle::annihilation_matrix(l, j) * v;
  for (int i = create.rank() - 1; i >= 0; --i)
    v = oracle::creation_matrix(l, create.modes[i]) * v;
  long hits = 0, where = -1;
  for (long b = 0; b < full; ++b)
    if (v(b) != 0.0) {
      ++hits;
      where = b;
    }
  if (hits == 0) return std::nullopt;
  REQUIRE(hits == 1);
  REQUIRE(std::abs(std::abs(v(where)) - 1.0) < 1e-12);
  return PairAction{static_cast<state_t>(where), v(where) > 0 ? 1 : -1};
}

ModeTuple tuple(std::initializer_list<int> modes) { return ModeTuple{std::vector<int>(modes)}; }

}  // namespace

TEST_CASE("binomial is exact") {
  CHECK(binomial(6, 5) == 6);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(10, 5) == 252);
  CHECK(binomial(4, 0) == 1);
  CHECK(binomial(3, 5) == 0);
  CHECK(binomial(64, 32) == 1832624140942590534L);
}

TEST_CASE("enumerate_basis orders states lexicographically by occupied tuple") {
  const ManyBodyBasis b21 = enumerate_basis(2, 1);
  CHECK(b21.dim() == 2);
  CHECK(b21.states[0] == 0b01);
  CHECK(b21.states[1] == 0b10);

  CHECK(enumerate_basis(6, 5).dim() == 6);

  const ManyBodyBasis b42 = enumerate_basis(4, 2);
  CHECK(b42.dim() == 6);
  CHECK(tuple_from_mask(b42.states.front()).modes == std::vector<int>{1, 2});
  CHECK(tuple_from_mask(b42.states.back()).modes == std::vector<int>{3, 4});
  // full order: (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
  const std::vector<state_t> expected{0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100};
  CHECK(b42.states == expected);
}

TEST_CASE("enumerate_basis rejects invalid sizes") {
  CHECK_THROWS_AS(enumerate_basis(4, 4), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_basis(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_basis(4, 5), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_basis(10, 5, 100), std::invalid_argument);  // 252 > cap
}

TEST_CASE("basis invariants across small sizes") {
  for (int l = 2; l <= 8; ++l)
    for (int n = 1; n < l; ++n) {
      const ManyBodyBasis basis = enumerate_basis(l, n);
      REQUIRE(basis.dim() == binomial(l, n));
      ModeTuple first = tuple_from_mask(basis.states.front());
      ModeTuple last = tuple_from_mask(basis.states.back());
      for (int i = 0; i < n; ++i) {
        CHECK(first.modes[i] == i + 1);
        CHECK(last.modes[i] == l - n + i + 1);
      }
      for (int i = 0; i < basis.dim(); ++i) {
        CHECK(std::popcount(basis.states[i]) == n);
        CHECK(basis.index_of(basis.states[i]) == i);
      }
    }
}

TEST_CASE("enumerate_kbody_indices") {
  const auto t42 = enumerate_kbody_indices(4, 2);
  REQUIRE(t42.size() == 6);
  CHECK(t42[0].modes == std::vector<int>{1, 2});
  CHECK(t42[1].modes == std::vector<int>{1, 3});
  CHECK(t42[2].modes == std::vector<int>{1, 4});
  CHECK(t42[3].modes == std::vector<int>{2, 3});
  CHECK(t42[4].modes == std::vector<int>{2, 4});
  CHECK(t42[5].modes == std::vector<int>{3, 4});

  const auto t31 = enumerate_kbody_indices(3, 1);
  REQUIRE(t31.size() == 3);
  CHECK(t31[0].modes == std::vector<int>{1});
  CHECK(t31[2].modes == std::vector<int>{3});

  CHECK(enumerate_kbody_indices(6, 3).size() == 20);
  CHECK_THROWS_AS(enumerate_kbody_indices(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_kbody_indices(4, 5), std::invalid_argument);
}

TEST_CASE("apply_pair matches hand-worked cases") {
  // {1,3}, create (2), annihilate (3) -> ({1,2}, +1)
  auto r = apply_pair(0b101, tuple({2}), tuple({3}), 3);
  REQUIRE(r.has_value());
  CHECK(r->state == 0b011);
  CHECK(r->sign == 1);

  // number operator on an occupied mode
  r = apply_pair(0b011, tuple({1}), tuple({1}), 3);
  REQUIRE(r.has_value());
  CHECK(r->state == 0b011);
  CHECK(r->sign == 1);

  // annihilating an empty mode
  CHECK_FALSE(apply_pair(0b011, tuple({3}), tuple({3}), 3).has_value());

  CHECK_THROWS_AS(apply_pair(0b011, tuple({2, 1}), tuple({1, 2}), 3), std::invalid_argument);
  CHECK_THROWS_AS(apply_pair(0b011, tuple({1, 4}), tuple({1, 2}), 3), std::invalid_argument);
  CHECK_THROWS_AS(apply_pair(0b011, tuple({1}), tuple({1, 2}), 3), std::invalid_argument);
}

TEST_CASE("apply_pair agrees with the full-Fock oracle, exhaustively for l <= 5") {
  for (int l = 3; l <= 5; ++l) {
    for (int k = 1; k <= l; ++k) {
      const auto tuples = enumerate_kbody_indices(l, k);
      for (state_t s = 0; s < (state_t{1} << l); ++s)
        for (const ModeTuple& create : tuples)
          for (const ModeTuple& annihilate : tuples) {
            const auto fast = apply_pair(s, create, annihilate, l);
            const auto slow = reference_apply(s, create, annihilate, l);
            REQUIRE(fast.has_value() == slow.has_value());
            if (fast) {
              CHECK(fast->state == slow->state);
              CHECK(fast->sign == slow->sign);
            }
          }
    }
  }
}

TEST_CASE("apply_pair agrees with the full-Fock oracle on sampled triples, l in {6,8}") {
  std::mt19937_64 gen(123);
  for (int l : {6, 8}) {
    for (int trial = 0; trial < 150; ++trial) {
      const int k = 1 + static_cast<int>(gen() % 3);
      const auto tuples = enumerate_kbody_indices(l, k);
      const state_t s = static_cast<state_t>(gen()) & ((state_t{1} << l) - 1);
      const ModeTuple& create = tuples[gen() % tuples.size()];
      const ModeTuple& annihilate = tuples[gen() % tuples.size()];
      const auto fast = apply_pair(s, create, annihilate, l);
      const auto slow = reference_apply(s, create, annihilate, l);
      REQUIRE(fast.has_value() == slow.has_value());
      if (fast) {
        CHECK(fast->state == slow->state);
        CHECK(fast->sign == slow->sign);
      }
    }
  }
}

TEST_CASE("hermiticity seed: swapped operators invert the action with the same sign") {
  std::mt19937_64 gen(321);
  for (int trial = 0; trial < 500; ++trial) {
    const int l = 4 + static_cast<int>(gen() % 4);
    const int k = 1 + static_cast<int>(gen() % 3);
    const auto tuples = enumerate_kbody_indices(l, k);
    const state_t s = static_cast<state_t>(gen()) & ((state_t{1} << l) - 1);
    const ModeTuple& create = tuples[gen() % tuples.size()];
    const ModeTuple& annihilate = tuples[gen() % tuples.size()];
    const auto forward = apply_pair(s, create, annihilate, l);
    if (!forward) continue;
    const auto back = apply_pair(forward->state, annihilate, create, l);
    REQUIRE(back.has_value());
    CHECK(back->state == s);
    CHECK(back->sign == forward->sign);
  }
}

TEST_CASE("structural adjacency is a regular graph") {
  SUBCASE("single particle, two modes: complete 2-node graph") {
    const auto adj = structural_adjacency(enumerate_basis(2, 1), 1);
    CHECK(adj[0][1]);
    CHECK(adj[1][0]);
  }

  SUBCASE("k = n couples every pair of states") {
    const auto adj = structural_adjacency(enumerate_basis(4, 2), 2);
    for (size_t i = 0; i < adj.size(); ++i)
      for (size_t j = 0; j < adj.size(); ++j) CHECK(adj[i][j]);
  }

  SUBCASE("equal off-diagonal degree for all nodes") {
    for (auto [l, n, k] : {std::tuple{6, 5, 3}, {6, 3, 2}, {7, 4, 2}, {5, 3, 1}}) {
      const auto adj = structural_adjacency(enumerate_basis(l, n), k);
      long degree = -1;
      for (size_t mu = 0; mu < adj.size(); ++mu) {
        long d = 0;
        for (size_t nu = 0; nu < adj.size(); ++nu)
          if (nu != mu && adj[mu][nu]) ++d;
        if (degree < 0) degree = d;
        CHECK(d == degree);
      }
    }
  }

  SUBCASE("matches brute-force operator-pair enumeration") {
    const ManyBodyBasis basis = enumerate_basis(5, 3);
    const int k = 2;
    const auto adj = structural_adjacency(basis, k);
    const auto tuples = enumerate_kbody_indices(5, k);
    for (int mu = 0; mu < basis.dim(); ++mu)
      for (int nu = 0; nu < basis.dim(); ++nu) {
        bool connected = false;
        for (const ModeTuple& a : tuples)
          for (const ModeTuple& g : tuples) {
            const auto r = apply_pair(basis.states[mu], a, g, 5);
            if (r && r->state == basis.states[nu]) connected = true;
          }
        CHECK(adj[nu][mu] == connected);
      }
  }
}
