#pragma once

#include <Eigen/Dense>

#include "egt/ensemble.hpp"
#include "egt/fock_basis.hpp"

// Dense reference construction on the full 2^l Fock space, built from
// Kronecker products of elementary 2x2 blocks with explicit sign strings.
// Deliberately independent of the bit-twiddling path in fock_basis: it is
// the oracle that path is checked against, both in the test suites and in
// the `check` command.
namespace egt::oracle {

// Full-Fock matrix of a_j (2^l x 2^l). Fock index b encodes mode j at bit
// j-1, so mode 1 is the last (fastest) Kronecker factor.
Eigen::MatrixXd annihilation_matrix(int l, int j);
Eigen::MatrixXd creation_matrix(int l, int j);

// Matrix of psi^dag_create psi_annihilate as a product of elementary
// matrices.
Eigen::MatrixXd operator_pair_matrix(int l, const ModeTuple& create, const ModeTuple& annihilate);

// Embedding via the full Fock space: assemble sum v_{a,g} psi^dag_a psi_g as
// a 2^l x 2^l matrix, then restrict to the rows/columns of the n-particle
// basis.
Eigen::MatrixXd embed_reference(const KBodyCoefficients& coeffs, const ManyBodyBasis& basis);

}  // namespace egt::oracle
