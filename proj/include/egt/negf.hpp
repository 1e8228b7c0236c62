#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "egt/ensemble.hpp"

namespace egt {

// Eigenvector-matrix condition number above which a spectral decomposition
// is flagged as near-defective and direct solves must be used instead.
inline constexpr double kDefectiveCondition = 1e8;

// Poles this close to the real axis are excluded from tau statistics and
// make the residue current ill-conditioned.
inline constexpr double kRealPoleCut = 1e-10;

// Wide-band two-terminal effective Hamiltonian h = H - i*eta*(E_in + E_out).
// Real part symmetric, imaginary part diagonal and nonzero only at the
// contact positions. Positions are 0-based.
struct EffectiveHamiltonian {
  Eigen::MatrixXcd h;
  int in_pos = 0;
  int out_pos = 0;
  double eta = 1.0;

  long dim() const { return h.rows(); }
};

EffectiveHamiltonian attach_leads(const Eigen::MatrixXd& hamiltonian, int in_pos, int out_pos,
                                  double eta);
EffectiveHamiltonian attach_leads(const HamiltonianSample& sample, int in_pos, int out_pos,
                                  double eta);
// Contacts at the first (left-filled) and last (right-filled) basis states.
EffectiveHamiltonian attach_leads(const HamiltonianSample& sample, double eta);

// Resonance poles eps_j and weights Ups_j = 2 phi_{j,in} phi_{j,out} of the
// complex symmetric effective Hamiltonian, with the unconjugated
// normalization phi^T phi = 1. Sorted by (Re, Im) ascending.
struct SpectralData {
  Eigen::VectorXcd poles;
  Eigen::VectorXcd weights;
  double eigenvector_condition = 0.0;
  bool near_defective = false;
  double eta = 1.0;
  int in_pos = 0;
  int out_pos = 0;

  long dim() const { return poles.size(); }
};

SpectralData spectral_decompose(const EffectiveHamiltonian& eff);

// G_{in,out}(E) by direct linear solve of (E - h) g = e_out. Throws
// numerical_error on a numerically singular system.
std::complex<double> green_in_out(const EffectiveHamiltonian& eff, double energy);

// Transmission T = 4 eta^2 |G_{in,out}(E)|^2.
double transmission_at(const EffectiveHamiltonian& eff, double energy);

// Complex amplitude sum_j Ups_j / (E - eps_j); equals 2 G_{in,out}(E).
// Rejects near-defective input.
std::complex<double> green_spectral_amplitude(const SpectralData& s, double energy);

// Transmission via the pole expansion, eta^2 |sum_j Ups_j/(E-eps_j)|^2.
double transmission_spectral(const SpectralData& s, double energy);

// Total current I = int T(E) dE in closed form by contour integration,
// I = eta^2 Re sum_{i,j} Ups_i conj(Ups_j) 2*pi*i / (conj(eps_j) - eps_i).
// Throws numerical_error for near-defective data, for a weighted pole on the
// real axis, or for a degenerate pole pair; callers fall back to quadrature.
double current_residue(const SpectralData& s);

// Total current by adaptive panel integration of transmission_at over
// [min Re eps - 50 eta, max Re eps + 50 eta], with forced subdivision at
// every Re eps_j and initial panel width <= max(|Im eps_j|, 1e-3 eta) around
// each pole, plus an analytic 1/E^4 tail fitted at the window edges.
// Converges to rel_tol or throws numerical_error carrying the partial value.
double current_quadrature(const EffectiveHamiltonian& eff, const SpectralData& s, double rel_tol);

// Re eps_j in ascending order.
std::vector<double> resonance_energies(const SpectralData& s);

}  // namespace egt
