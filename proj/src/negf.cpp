#include "egt/negf.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "egt/errors.hpp"

namespace egt {

namespace {
using cd = std::complex<double>;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

EffectiveHamiltonian attach_leads(const Eigen::MatrixXd& hamiltonian, int in_pos, int out_pos,
                                  double eta) {
  const long dim = hamiltonian.rows();
  if (hamiltonian.cols() != dim) throw std::invalid_argument("hamiltonian must be square");
  if (in_pos < 0 || in_pos >= dim || out_pos < 0 || out_pos >= dim)
    throw std::invalid_argument("contact position out of range");
  if (in_pos == out_pos) throw std::invalid_argument("in and out contacts must differ");
  if (!(eta > 0)) throw std::invalid_argument("lead coupling eta must be positive");
  EffectiveHamiltonian eff;
  eff.h = hamiltonian.cast<cd>();
  eff.h(in_pos, in_pos) -= cd(0.0, eta);
  eff.h(out_pos, out_pos) -= cd(0.0, eta);
  eff.in_pos = in_pos;
  eff.out_pos = out_pos;
  eff.eta = eta;
  return eff;
}

EffectiveHamiltonian attach_leads(const HamiltonianSample& sample, int in_pos, int out_pos,
                                  double eta) {
  return attach_leads(sample.matrix, in_pos, out_pos, eta);
}

EffectiveHamiltonian attach_leads(const HamiltonianSample& sample, double eta) {
  return attach_leads(sample.matrix, 0, static_cast<int>(sample.matrix.rows()) - 1, eta);
}

SpectralData spectral_decompose(const EffectiveHamiltonian& eff) {
  const long dim = eff.dim();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(eff.h, true);
  if (solver.info() != Eigen::Success)
    throw numerical_error("complex eigensolver failed to converge");

  Eigen::VectorXcd poles = solver.eigenvalues();
  Eigen::MatrixXcd vecs = solver.eigenvectors();

  SpectralData s;
  s.eta = eff.eta;
  s.in_pos = eff.in_pos;
  s.out_pos = eff.out_pos;
  s.poles.resize(dim);
  s.weights.resize(dim);

  // Renormalize each eigenvector to phi^T phi = 1 (unconjugated). A vanishing
  // quadratic form signals a quasi-null vector at an exceptional point.
  Eigen::MatrixXcd normalized(dim, dim);
  bool quasi_null = false;
  for (long j = 0; j < dim; ++j) {
    const cd q = vecs.col(j).transpose() * vecs.col(j);
    if (std::abs(q) < 1e-300) {
      quasi_null = true;
      normalized.col(j) = vecs.col(j);
      continue;
    }
    normalized.col(j) = vecs.col(j) / std::sqrt(q);
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(normalized);
  const double smin = svd.singularValues()(dim - 1);
  const double smax = svd.singularValues()(0);
  s.eigenvector_condition =
      smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  s.near_defective = quasi_null || !(s.eigenvector_condition <= kDefectiveCondition);

  for (long j = 0; j < dim; ++j)
    s.weights(j) = 2.0 * normalized(eff.in_pos, j) * normalized(eff.out_pos, j);

  std::vector<long> order(dim);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](long a, long b) {
    if (poles(a).real() != poles(b).real()) return poles(a).real() < poles(b).real();
    return poles(a).imag() < poles(b).imag();
  });
  Eigen::VectorXcd sorted_w(dim);
  for (long j = 0; j < dim; ++j) {
    s.poles(j) = poles(order[j]);
    sorted_w(j) = s.weights(order[j]);
  }
  s.weights = sorted_w;
  return s;
}

std::complex<double> green_in_out(const EffectiveHamiltonian& eff, double energy) {
  const long dim = eff.dim();
  Eigen::MatrixXcd m = -eff.h;
  m.diagonal().array() += cd(energy, 0.0);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
  rhs(eff.out_pos) = 1.0;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  Eigen::VectorXcd g = lu.solve(rhs);
  const double residual = (m * g - rhs).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  if (!(residual <= 1e-6 * scale))
    throw numerical_error("numerically singular resolvent at E=" + std::to_string(energy));
  return g(eff.in_pos);
}

double transmission_at(const EffectiveHamiltonian& eff, double energy) {
  const cd g = green_in_out(eff, energy);
  return 4.0 * eff.eta * eff.eta * std::norm(g);
}

std::complex<double> green_spectral_amplitude(const SpectralData& s, double energy) {
  if (s.near_defective)
    throw numerical_error("spectral data flagged near-defective; use direct solves");
  cd amp = 0.0;
  for (long j = 0; j < s.dim(); ++j) amp += s.weights(j) / (cd(energy, 0.0) - s.poles(j));
  return amp;
}

double transmission_spectral(const SpectralData& s, double energy) {
  return s.eta * s.eta * std::norm(green_spectral_amplitude(s, energy));
}

double current_residue(const SpectralData& s) {
  if (s.near_defective)
    throw numerical_error("spectral data flagged near-defective; use quadrature");
  const long dim = s.dim();
  for (long j = 0; j < dim; ++j)
    if (s.poles(j).imag() >= -1e-12 && std::abs(s.weights(j)) > 1e-12)
      throw numerical_error("weighted pole on the real axis; use quadrature");
  cd acc = 0.0;
  for (long i = 0; i < dim; ++i)
    for (long j = 0; j < dim; ++j) {
      const cd denom = std::conj(s.poles(j)) - s.poles(i);
      const double wprod = std::abs(s.weights(i)) * std::abs(s.weights(j));
      if (std::abs(denom) < 1e-12) {
        if (wprod > 1e-24)
          throw numerical_error("degenerate pole pair in residue sum; use quadrature");
        continue;
      }
      acc += s.weights(i) * std::conj(s.weights(j)) * cd(0.0, 2.0 * kPi) / denom;
    }
  const double scale = std::max(std::abs(acc), 1e-300);
  if (std::abs(acc.imag()) > 1e-9 * scale || acc.real() < -1e-9 * scale)
    throw numerical_error("residue sum is not a nonnegative real; use quadrature");
  return s.eta * s.eta * std::max(acc.real(), 0.0);
}

namespace {

struct Panel {
  double a, b;
  double fa, fm, fb;
  double estimate;  // Simpson on [a, b]
  double error;     // refined error estimate, set after first split
};

double simpson(double h, double fa, double fm, double fb) {
  return (fa + 4.0 * fm + fb) * h / 6.0;
}

}  // namespace

double current_quadrature(const EffectiveHamiltonian& eff, const SpectralData& s,
                          double rel_tol) {
  if (!(rel_tol > 0) || rel_tol > 1e-2)
    throw std::invalid_argument("rel_tol must lie in (0, 1e-2]");
  const double eta = eff.eta;
  const long dim = s.dim();
  double re_lo = s.poles(0).real(), re_hi = s.poles(0).real(), re_abs = 0.0;
  for (long j = 0; j < dim; ++j) {
    re_lo = std::min(re_lo, s.poles(j).real());
    re_hi = std::max(re_hi, s.poles(j).real());
    re_abs = std::max(re_abs, std::abs(s.poles(j).real()));
  }
  // The 1/E^4 tail fit needs window edges well outside the band and away
  // from the origin; the 50*eta margin covers that unless the band sits far
  // from zero.
  const double lo = std::min(re_lo - 50.0 * eta, -(2.0 * re_abs + 10.0 * eta));
  const double hi = std::max(re_hi + 50.0 * eta, 2.0 * re_abs + 10.0 * eta);

  // Bracket every pole with a panel no wider than its resonance width. The
  // bracket offsets are asymmetric with an irrational ratio, so no panel
  // endpoint or dyadic midpoint ever lands exactly on a pole center, where
  // the resolvent solve of a (numerically) real eigenvalue would be singular.
  constexpr double kLeftOffset = 0.5;
  constexpr double kRightOffset = 0.30901699437494742;
  std::vector<double> cuts;
  for (long j = 0; j < dim; ++j) {
    const double re = s.poles(j).real();
    const double w = std::max(std::abs(s.poles(j).imag()), 1e-3 * eta);
    cuts.push_back(re - kLeftOffset * w);
    cuts.push_back(re + kRightOffset * w);
  }
  std::erase_if(cuts, [&](double x) { return x <= lo || x >= hi; });
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double x, double y) { return y - x < 1e-13 * (hi - lo); }),
             cuts.end());

  const auto f = [&](double e) { return transmission_at(eff, e); };

  auto make_panel = [&](double a, double b, double fa, double fb) {
    Panel p;
    p.a = a;
    p.b = b;
    p.fa = fa;
    p.fb = fb;
    p.fm = f(0.5 * (a + b));
    p.estimate = simpson(b - a, p.fa, p.fm, p.fb);
    p.error = std::abs(p.estimate);  // refined on first split
    return p;
  };

  const auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(worse)> queue(worse);

  double total = 0.0, total_err = 0.0;
  std::vector<double> fcuts(cuts.size());
  for (size_t i = 0; i < cuts.size(); ++i) fcuts[i] = f(cuts[i]);
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = make_panel(cuts[i], cuts[i + 1], fcuts[i], fcuts[i + 1]);
    total += p.estimate;
    total_err += p.error;
    queue.push(p);
  }

  const double tail = fcuts.back() * hi / 3.0 + fcuts.front() * std::abs(lo) / 3.0;

  long budget = 200000;
  while (!queue.empty() && total_err > 0.5 * rel_tol * std::max(std::abs(total), 1e-12)) {
    if (--budget < 0)
      throw numerical_error("quadrature panel budget exhausted", total + tail);
    Panel p = queue.top();
    queue.pop();
    const double m = 0.5 * (p.a + p.b);
    Panel left = make_panel(p.a, m, p.fa, p.fm);
    Panel right = make_panel(m, p.b, p.fm, p.fb);
    const double refined = left.estimate + right.estimate;
    const double err = std::abs(refined - p.estimate) / 15.0;
    left.error = right.error = 0.5 * err;
    total += refined - p.estimate;
    total_err += err - p.error;
    queue.push(left);
    queue.push(right);
  }
  return total + tail;
}

std::vector<double> resonance_energies(const SpectralData& s) {
  std::vector<double> out(s.dim());
  for (long j = 0; j < s.dim(); ++j) out[j] = s.poles(j).real();
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace egt
