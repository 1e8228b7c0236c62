#pragma once

#include <complex>
#include <vector>

#include "egt/config.hpp"
#include "egt/negf.hpp"

namespace egt {

enum class Flavor { kEge, kCsege };

inline const char* flavor_name(Flavor f) { return f == Flavor::kEge ? "ege" : "csege"; }

// Everything retained per realization and flavor. Transmissions are stored
// clamped to [0, 1] after the unitarity slack check.
struct FlavorRecord {
  double current = 0.0;
  bool current_via_quadrature = false;
  bool near_defective = false;
  Eigen::VectorXcd poles;    // sorted by (Re, Im)
  Eigen::VectorXcd weights;  // aligned with poles
  std::vector<double> tau;   // |Ups_j / Im eps_j|, aligned with poles
  std::vector<std::complex<double>> green_at_res;  // 2*eta*G_in,out(Re eps_j)
  std::vector<double> t_at_res;
  std::vector<double> random_energies;
  std::vector<double> t_at_random;
  double re_span = 0.0;
  // invariant residuals, aggregated into the run report
  double trace_residual = 0.0;
  double weight_sum_abs = 0.0;
  double im_range_excess = 0.0;
  double t_bound_excess = 0.0;
};

struct RealizationPair {
  long index = 0;
  SeedRecord seed;
  FlavorRecord ege;
  FlavorRecord csege;
  double commutator_norm = 0.0;  // max |[H_cs, J_n]|

  const FlavorRecord& flavor(Flavor f) const { return f == Flavor::kEge ? ege : csege; }
};

// Immutable shared inputs for parallel workers.
struct EnsembleContext {
  JobConfig config;
  ManyBodyBasis basis;
  KBodyIndexSet kidx;
  SignedInvolution jk;
  SignedInvolution jn;
};

EnsembleContext make_context(const JobConfig& config);

// Both flavors of realization `index`, derived from the same raw Gaussian
// draw. Deterministic function of (config, index).
RealizationPair run_realization(const EnsembleContext& ctx, long index);
RealizationPair run_realization(const JobConfig& config, long index);

// Symmetric energy grid [-E_max, E_max]: E_max is the largest |Re eps| seen
// in a fixed 100-realization pilot over both flavors, plus 5*eta.
std::vector<double> energy_grid(const EnsembleContext& ctx);

// T(E) on the grid recomputed from a record: pole expansion when the record
// is clean, direct solves on a Hamiltonian rebuilt from the seed otherwise.
std::vector<double> transmission_curve(const EnsembleContext& ctx, const RealizationPair& pair,
                                       Flavor flavor, const std::vector<double>& grid);

struct Histogram {
  enum class Normalization { kCount, kDensity };
  std::vector<double> edges;  // bins+1, strictly increasing
  std::vector<long> counts;   // per bin; values on the top edge land in the last bin
  Normalization normalization = Normalization::kCount;

  long total() const;
  std::vector<double> density() const;
};

// Values outside [lo, hi] are clamped into the boundary bins.
Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins);

// Fixed transmission binning: 50 uniform bins on [0,1]; the top bin
// [0.98, 1] holds the near-perfect resonances and is reported separately.
inline constexpr int kTransmissionBins = 50;

struct ModeEstimate {
  double location = 0.0;
  double bin_width = 0.0;
};

// Tallest-bin center over `bins` equal-width bins spanning [0, upper]. Ties
// pick the lower bin; a single-valued sample returns that value directly.
ModeEstimate current_mode(const std::vector<double>& currents, int bins, double upper);

struct MeanCurve {
  std::vector<double> mean;  // clamped to [0, 1]
  std::vector<double> sem;
};

MeanCurve averaged_transmission(const EnsembleContext& ctx,
                                const std::vector<RealizationPair>& records, Flavor flavor,
                                const std::vector<double>& grid);

Histogram resonance_transmission_stats(const std::vector<RealizationPair>& records,
                                       Flavor flavor);
Histogram random_energy_transmission_stats(const std::vector<RealizationPair>& records,
                                           Flavor flavor);

// 2*eta*G_in,out(Re eps_j) for every pole of every record; all points lie in
// the closed unit disk.
std::vector<std::complex<double>> scatter_green(const std::vector<RealizationPair>& records,
                                                Flavor flavor);

struct TauStats {
  Histogram hist;           // 60 bins on [0, max(2, tau_max)]
  long excluded = 0;        // poles with |Im eps| <= kRealPoleCut, counted not binned
  long defective_skipped = 0;
  double min_tau = 0.0;
  double fraction_below_one = 0.0;
};

TauStats tau_statistics(const std::vector<RealizationPair>& records, Flavor flavor);

struct FlavorSummary {
  long count = 0;
  double mean_current = 0.0;
  double sem_current = 0.0;
  ModeEstimate mode;
  std::vector<double> t_mean;
  std::vector<double> t_sem;
  Histogram re_eps;
  Histogram im_eps;
  Histogram ups_abs;
  TauStats tau;
  Histogram t_res;
  Histogram t_random;
  std::vector<std::complex<double>> scatter;
  double mean_re_span = 0.0;
  double sem_re_span = 0.0;
  long defective_count = 0;
  long quadrature_fallbacks = 0;
};

struct InvariantTallies {
  double commutator_max = 0.0;
  double trace_residual_max = 0.0;
  double weight_sum_max = 0.0;
  double im_range_excess_max = 0.0;
  double t_bound_excess_max = 0.0;
};

struct EnsembleResult {
  JobConfig config;
  std::vector<double> grid;
  std::vector<RealizationPair> records;
  FlavorSummary ege;
  FlavorSummary csege;
  InvariantTallies tallies;

  const FlavorSummary& flavor(Flavor f) const { return f == Flavor::kEge ? ege : csege; }
};

// Seeded parallel ensemble with an index-ordered deterministic reduction:
// the result is a pure function of the config, independent of worker count.
EnsembleResult run_ensemble(const JobConfig& config);

struct CurrentSample {
  int l = 0;
  int n = 0;
  int k = 0;
  std::vector<double> currents;
};

struct PairedComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double pooled_se = 0.0;
  double z = 0.0;           // |mean difference| in pooled standard errors
  double ks_distance = 0.0; // two-sample Kolmogorov-Smirnov statistic
  double ks_critical = 0.0;
  bool pass = false;
};

// Compare current samples of a particle-hole related parameter pair:
// (n, k=n) vs (l-n, k=l-n), or (n, k=1) vs (l-n, k=1).
PairedComparison particle_hole_check(const CurrentSample& a, const CurrentSample& b,
                                     double z_threshold = 3.0, double ks_coefficient = 1.95);

}  // namespace egt
