#include "egt/fock_oracle.hpp"

#include <stdexcept>

namespace egt::oracle {

namespace {

Eigen::MatrixXd kron(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd out(x.rows() * y.rows(), x.cols() * y.cols());
  for (long i = 0; i < x.rows(); ++i)
    for (long j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

// a_j = I^{(l-j)} (x) A (x) Z^{(j-1)} with A = |0><1| and Z = diag(1,-1);
// the Z string on modes below j carries the fermionic sign.
Eigen::MatrixXd elementary(int l, int j) {
  if (l < 1 || l > 20) throw std::invalid_argument("oracle limited to l <= 20");
  if (j < 1 || j > l) throw std::invalid_argument("mode label out of range");
  Eigen::MatrixXd a(2, 2), z(2, 2), id(2, 2);
  a << 0, 1, 0, 0;
  z << 1, 0, 0, -1;
  id << 1, 0, 0, 1;
  Eigen::MatrixXd m(1, 1);
  m << 1;
  for (int f = l; f >= 1; --f) {
    if (f > j)
      m = kron(m, id);
    else if (f == j)
      m = kron(m, a);
    else
      m = kron(m, z);
  }
  return m;
}

}  // namespace

Eigen::MatrixXd annihilation_matrix(int l, int j) { return elementary(l, j); }

Eigen::MatrixXd creation_matrix(int l, int j) { return elementary(l, j).transpose(); }

Eigen::MatrixXd operator_pair_matrix(int l, const ModeTuple& create,
                                     const ModeTuple& annihilate) {
  if (create.rank() != annihilate.rank())
    throw std::invalid_argument("create/annihilate tuples must have equal rank");
  const long full = 1L << l;
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(full, full);
  // psi_gamma = (psi^dag_gamma)^dag: as an operator string a_{g_k}...a_{g_1},
  // so the lowest mode acts on the ket first.
  for (int i = annihilate.rank() - 1; i >= 0; --i)
    m = m * annihilation_matrix(l, annihilate.modes[i]);
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(full, full);
  for (int j : create.modes) c = c * creation_matrix(l, j);
  return c * m;
}

Eigen::MatrixXd embed_reference(const KBodyCoefficients& coeffs, const ManyBodyBasis& basis) {
  const int l = basis.l;
  const long full = 1L << l;
  const auto tuples = enumerate_kbody_indices(l, coeffs.k);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(full, full);
  for (long a = 0; a < static_cast<long>(tuples.size()); ++a)
    for (long g = 0; g < static_cast<long>(tuples.size()); ++g)
      acc += coeffs.values(a, g) * operator_pair_matrix(l, tuples[a], tuples[g]);
  const long dim = basis.dim();
  Eigen::MatrixXd restricted(dim, dim);
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j)
      restricted(i, j) = acc(static_cast<long>(basis.states[i]),
                             static_cast<long>(basis.states[j]));
  return restricted;
}

}  // namespace egt::oracle
