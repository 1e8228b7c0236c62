#include "egt/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "egt/errors.hpp"

namespace egt {

namespace {

using cd = std::complex<double>;

// Slack for the unitarity bound on stored transmissions. Direct solves at
// resonance centers of flagged samples are allowed a looser slack since the
// solve conditioning there is 1/|Im eps|.
constexpr double kTransmissionSlack = 1e-10;
constexpr double kTransmissionSlackDefective = 1e-6;

double clamp_transmission(double t, bool defective) {
  const double slack = defective ? kTransmissionSlackDefective : kTransmissionSlack;
  if (!(t >= 0.0) || t > 1.0 + slack)
    throw numerical_error("transmission " + std::to_string(t) + " violates the unitarity bound");
  return std::min(t, 1.0);
}

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

MeanSem mean_sem(const std::vector<double>& xs) {
  MeanSem out;
  const long count = static_cast<long>(xs.size());
  if (count == 0) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / count;
  if (count < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  out.sem = std::sqrt(ss / (count - 1) / count);
  return out;
}

}  // namespace

EnsembleContext make_context(const JobConfig& config) {
  config.validate();
  EnsembleContext ctx;
  ctx.config = config;
  ctx.basis = enumerate_basis(config.l, config.n, config.dimension_cap);
  ctx.kidx = make_kbody_index_set(config.l, config.k);
  ctx.jk = build_exchange(config.l, config.k);
  ctx.jn = build_exchange(config.l, config.n);
  return ctx;
}

namespace {

FlavorRecord make_flavor_record(const EnsembleContext& ctx, const HamiltonianSample& sample,
                                const std::vector<double>& uniforms) {
  const JobConfig& cfg = ctx.config;
  FlavorRecord rec;
  const EffectiveHamiltonian eff = attach_leads(sample, cfg.eta);
  const SpectralData sd = spectral_decompose(eff);
  rec.near_defective = sd.near_defective;
  rec.poles = sd.poles;
  rec.weights = sd.weights;

  if (sd.near_defective) {
    rec.current = current_quadrature(eff, sd, cfg.rel_tol_current);
    rec.current_via_quadrature = true;
  } else {
    try {
      rec.current = current_residue(sd);
    } catch (const numerical_error&) {
      rec.current = current_quadrature(eff, sd, cfg.rel_tol_current);
      rec.current_via_quadrature = true;
    }
  }

  const long dim = sd.dim();
  double re_lo = sd.poles(0).real(), re_hi = sd.poles(0).real();
  cd weight_sum = 0.0;
  double im_sum = 0.0;
  rec.tau.resize(dim);
  rec.green_at_res.resize(dim);
  rec.t_at_res.resize(dim);
  for (long j = 0; j < dim; ++j) {
    const double re = sd.poles(j).real();
    const double im = sd.poles(j).imag();
    re_lo = std::min(re_lo, re);
    re_hi = std::max(re_hi, re);
    im_sum += im;
    weight_sum += sd.weights(j);
    rec.im_range_excess = std::max({rec.im_range_excess, im, -im - cfg.eta});
    rec.tau[j] = std::abs(sd.weights(j)) / std::abs(im);
    const cd amp = sd.near_defective ? 2.0 * cfg.eta * green_in_out(eff, re)
                                     : cfg.eta * green_spectral_amplitude(sd, re);
    rec.green_at_res[j] = amp;
    rec.t_at_res[j] = clamp_transmission(std::norm(amp), sd.near_defective);
  }
  rec.re_span = re_hi - re_lo;
  rec.trace_residual = std::abs(im_sum + 2.0 * cfg.eta) / (2.0 * cfg.eta);
  rec.weight_sum_abs = sd.near_defective ? 0.0 : std::abs(weight_sum);

  rec.random_energies.resize(uniforms.size());
  rec.t_at_random.resize(uniforms.size());
  for (size_t r = 0; r < uniforms.size(); ++r) {
    const double e = re_lo + uniforms[r] * (re_hi - re_lo);
    rec.random_energies[r] = e;
    const double t = sd.near_defective ? transmission_at(eff, e) : transmission_spectral(sd, e);
    rec.t_at_random[r] = clamp_transmission(t, sd.near_defective);
    rec.t_bound_excess = std::max(rec.t_bound_excess, t - 1.0);
  }
  return rec;
}

}  // namespace

RealizationPair run_realization(const EnsembleContext& ctx, long index) {
  const JobConfig& cfg = ctx.config;
  const std::uint64_t child = child_seed(cfg.master_seed, kCoefficientStream, index);
  NormalStream rng(child);
  const KBodyCoefficients raw = sample_coefficients(rng, cfg.l, cfg.k);
  const KBodyCoefficients centro = cfg.centro_sampling == CentroSampling::kAverage
                                       ? symmetrize_centro(raw, ctx.jk)
                                       : orbit_project(raw, ctx.jk);

  RealizationPair pair;
  pair.index = index;
  pair.seed = SeedRecord{cfg.master_seed, static_cast<std::uint64_t>(index), child};

  HamiltonianSample h_ege = embed_hamiltonian(raw, ctx.basis, ctx.kidx);
  h_ege.seed = pair.seed;
  HamiltonianSample h_cs = embed_hamiltonian(centro, ctx.basis, ctx.kidx);
  h_cs.seed = pair.seed;
  h_cs.centrosymmetric = true;
  pair.commutator_norm = commutator_max_norm(h_cs.matrix, ctx.jn);

  // Both flavors' energy draws come from one stream in a fixed order.
  NormalStream erng(child_seed(cfg.master_seed, kEnergyStream, index));
  const int n_random = cfg.random_energies_per_sample;
  std::vector<double> u_ege(n_random), u_cs(n_random);
  for (int r = 0; r < n_random; ++r) u_ege[r] = erng.uniform();
  for (int r = 0; r < n_random; ++r) u_cs[r] = erng.uniform();

  pair.ege = make_flavor_record(ctx, h_ege, u_ege);
  pair.csege = make_flavor_record(ctx, h_cs, u_cs);
  return pair;
}

RealizationPair run_realization(const JobConfig& config, long index) {
  return run_realization(make_context(config), index);
}

std::vector<double> energy_grid(const EnsembleContext& ctx) {
  const JobConfig& cfg = ctx.config;
  constexpr long kPilotSize = 100;
  double re_abs = 0.0;
  for (long i = 0; i < kPilotSize; ++i) {
    const std::uint64_t child = child_seed(cfg.master_seed, kCoefficientStream, i);
    NormalStream rng(child);
    const KBodyCoefficients raw = sample_coefficients(rng, cfg.l, cfg.k);
    const KBodyCoefficients centro = cfg.centro_sampling == CentroSampling::kAverage
                                         ? symmetrize_centro(raw, ctx.jk)
                                         : orbit_project(raw, ctx.jk);
    for (const KBodyCoefficients* v : {&raw, &centro}) {
      const HamiltonianSample sample = embed_hamiltonian(*v, ctx.basis, ctx.kidx);
      const Eigen::VectorXcd poles =
          spectral_decompose(attach_leads(sample, cfg.eta)).poles;
      for (long j = 0; j < poles.size(); ++j) re_abs = std::max(re_abs, std::abs(poles(j).real()));
    }
  }
  const double e_max = re_abs + 5.0 * cfg.eta;
  std::vector<double> grid(cfg.energy_grid_points);
  const long points = cfg.energy_grid_points;
  for (long i = 0; i < points; ++i)
    grid[i] = -e_max + 2.0 * e_max * static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

std::vector<double> transmission_curve(const EnsembleContext& ctx, const RealizationPair& pair,
                                       Flavor flavor, const std::vector<double>& grid) {
  const FlavorRecord& rec = pair.flavor(flavor);
  std::vector<double> curve(grid.size());
  if (!rec.near_defective) {
    SpectralData sd;
    sd.poles = rec.poles;
    sd.weights = rec.weights;
    sd.eta = ctx.config.eta;
    for (size_t i = 0; i < grid.size(); ++i)
      curve[i] = clamp_transmission(transmission_spectral(sd, grid[i]), false);
    return curve;
  }
  // Flagged record: rebuild the Hamiltonian from its seed and solve directly.
  const HamiltonianSample sample =
      sample_hamiltonian(pair.seed.master, pair.seed.index, ctx.config.l, ctx.config.n,
                         ctx.config.k, flavor == Flavor::kCsege, ctx.config.centro_sampling);
  const EffectiveHamiltonian eff = attach_leads(sample, ctx.config.eta);
  for (size_t i = 0; i < grid.size(); ++i)
    curve[i] = clamp_transmission(transmission_at(eff, grid[i]), true);
  return curve;
}

long Histogram::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

std::vector<double> Histogram::density() const {
  std::vector<double> d(counts.size(), 0.0);
  const long t = total();
  if (t == 0) return d;
  for (size_t i = 0; i < counts.size(); ++i)
    d[i] = static_cast<double>(counts[i]) / (t * (edges[i + 1] - edges[i]));
  return d;
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw std::invalid_argument("invalid histogram binning");
  Histogram h;
  h.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + (hi - lo) * i / bins;
  h.counts.assign(bins, 0);
  for (double v : values) {
    int bin = static_cast<int>((v - lo) / (hi - lo) * bins);
    bin = std::clamp(bin, 0, bins - 1);
    ++h.counts[bin];
  }
  return h;
}

ModeEstimate current_mode(const std::vector<double>& currents, int bins, double upper) {
  if (currents.empty()) throw std::invalid_argument("mode of an empty sample");
  const auto [lo_it, hi_it] = std::minmax_element(currents.begin(), currents.end());
  if (*lo_it == *hi_it) return ModeEstimate{*lo_it, upper > 0 ? upper / bins : 0.0};
  if (!(upper > 0)) throw std::invalid_argument("mode binning needs a positive upper bound");
  const Histogram h = make_histogram(currents, 0.0, upper, bins);
  const auto tallest = std::max_element(h.counts.begin(), h.counts.end());
  const long bin = tallest - h.counts.begin();
  return ModeEstimate{0.5 * (h.edges[bin] + h.edges[bin + 1]), upper / bins};
}

MeanCurve averaged_transmission(const EnsembleContext& ctx,
                                const std::vector<RealizationPair>& records, Flavor flavor,
                                const std::vector<double>& grid) {
  if (records.empty()) throw std::invalid_argument("averaged transmission of an empty ensemble");
  const size_t points = grid.size();
  std::vector<double> sum(points, 0.0), sumsq(points, 0.0);
  for (const RealizationPair& pair : records) {
    const std::vector<double> curve = transmission_curve(ctx, pair, flavor, grid);
    for (size_t i = 0; i < points; ++i) {
      sum[i] += curve[i];
      sumsq[i] += curve[i] * curve[i];
    }
  }
  MeanCurve out;
  out.mean.resize(points);
  out.sem.resize(points);
  const double count = static_cast<double>(records.size());
  for (size_t i = 0; i < points; ++i) {
    const double mean = sum[i] / count;
    out.mean[i] = std::clamp(mean, 0.0, 1.0);
    out.sem[i] = count > 1
                     ? std::sqrt(std::max(0.0, (sumsq[i] - count * mean * mean) / (count - 1)) /
                                 count)
                     : 0.0;
  }
  return out;
}

namespace {

Histogram transmission_histogram(const std::vector<RealizationPair>& records, Flavor flavor,
                                 bool at_resonance) {
  std::vector<double> values;
  for (const RealizationPair& pair : records) {
    const FlavorRecord& rec = pair.flavor(flavor);
    const std::vector<double>& src = at_resonance ? rec.t_at_res : rec.t_at_random;
    values.insert(values.end(), src.begin(), src.end());
  }
  return make_histogram(values, 0.0, 1.0, kTransmissionBins);
}

}  // namespace

Histogram resonance_transmission_stats(const std::vector<RealizationPair>& records,
                                       Flavor flavor) {
  return transmission_histogram(records, flavor, true);
}

Histogram random_energy_transmission_stats(const std::vector<RealizationPair>& records,
                                           Flavor flavor) {
  return transmission_histogram(records, flavor, false);
}

std::vector<std::complex<double>> scatter_green(const std::vector<RealizationPair>& records,
                                                Flavor flavor) {
  std::vector<std::complex<double>> points;
  for (const RealizationPair& pair : records) {
    const FlavorRecord& rec = pair.flavor(flavor);
    points.insert(points.end(), rec.green_at_res.begin(), rec.green_at_res.end());
  }
  return points;
}

TauStats tau_statistics(const std::vector<RealizationPair>& records, Flavor flavor) {
  TauStats stats;
  std::vector<double> taus;
  long below_one = 0;
  for (const RealizationPair& pair : records) {
    const FlavorRecord& rec = pair.flavor(flavor);
    if (rec.near_defective) {
      stats.defective_skipped += rec.poles.size();
      continue;
    }
    for (long j = 0; j < rec.poles.size(); ++j) {
      if (std::abs(rec.poles(j).imag()) <= kRealPoleCut) {
        ++stats.excluded;
        continue;
      }
      taus.push_back(rec.tau[j]);
      if (rec.tau[j] < 1.0) ++below_one;
    }
  }
  double tau_max = 2.0;
  for (double t : taus) tau_max = std::max(tau_max, t);
  stats.hist = make_histogram(taus, 0.0, tau_max, 60);
  stats.min_tau = taus.empty() ? 0.0 : *std::min_element(taus.begin(), taus.end());
  stats.fraction_below_one = taus.empty() ? 0.0 : static_cast<double>(below_one) / taus.size();
  return stats;
}

namespace {

FlavorSummary summarize_flavor(const EnsembleContext& ctx,
                               const std::vector<RealizationPair>& records, Flavor flavor,
                               const std::vector<double>& t_sum, const std::vector<double>& t_sumsq,
                               double shared_current_upper) {
  FlavorSummary s;
  s.count = static_cast<long>(records.size());

  std::vector<double> currents, spans, re_values, im_values, ups_values;
  for (const RealizationPair& pair : records) {
    const FlavorRecord& rec = pair.flavor(flavor);
    currents.push_back(rec.current);
    spans.push_back(rec.re_span);
    if (rec.near_defective) ++s.defective_count;
    if (rec.current_via_quadrature) ++s.quadrature_fallbacks;
    for (long j = 0; j < rec.poles.size(); ++j) {
      re_values.push_back(rec.poles(j).real());
      im_values.push_back(rec.poles(j).imag());
      if (!rec.near_defective) ups_values.push_back(std::abs(rec.weights(j)));
    }
  }

  const MeanSem cur = mean_sem(currents);
  s.mean_current = cur.mean;
  s.sem_current = cur.sem;
  s.mode = current_mode(currents, 100, shared_current_upper);
  const MeanSem span = mean_sem(spans);
  s.mean_re_span = span.mean;
  s.sem_re_span = span.sem;

  const double count = static_cast<double>(records.size());
  s.t_mean.resize(t_sum.size());
  s.t_sem.resize(t_sum.size());
  for (size_t i = 0; i < t_sum.size(); ++i) {
    const double mean = t_sum[i] / count;
    s.t_mean[i] = std::clamp(mean, 0.0, 1.0);
    s.t_sem[i] = count > 1 ? std::sqrt(std::max(0.0, (t_sumsq[i] - count * mean * mean) /
                                                          (count - 1)) /
                                       count)
                           : 0.0;
  }

  double re_abs = 1.0;
  for (double v : re_values) re_abs = std::max(re_abs, std::abs(v));
  s.re_eps = make_histogram(re_values, -re_abs, re_abs, 101);
  s.im_eps = make_histogram(im_values, -ctx.config.eta, 0.0, 50);
  double ups_max = 1.0;
  for (double v : ups_values) ups_max = std::max(ups_max, v);
  s.ups_abs = make_histogram(ups_values, 0.0, ups_max, 50);
  s.tau = tau_statistics(records, flavor);
  s.t_res = resonance_transmission_stats(records, flavor);
  s.t_random = random_energy_transmission_stats(records, flavor);
  s.scatter = scatter_green(records, flavor);
  return s;
}

}  // namespace

EnsembleResult run_ensemble(const JobConfig& config) {
  const EnsembleContext ctx = make_context(config);
  EnsembleResult result;
  result.config = config;
  result.grid = energy_grid(ctx);

  const long size = config.ensemble_size;
  result.records.resize(size);

  const size_t points = result.grid.size();
  std::vector<double> sum_e(points, 0.0), sumsq_e(points, 0.0);
  std::vector<double> sum_c(points, 0.0), sumsq_c(points, 0.0);

  int workers = config.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  constexpr long kChunk = 256;

  struct Slot {
    std::vector<double> curve_ege, curve_cs;
    std::exception_ptr error;
  };

  for (long chunk_begin = 0; chunk_begin < size; chunk_begin += kChunk) {
    const long chunk_end = std::min(size, chunk_begin + kChunk);
    const long chunk_size = chunk_end - chunk_begin;
    std::vector<Slot> slots(chunk_size);
    std::atomic<long> cursor{0};
    auto work = [&]() {
      for (;;) {
        const long offset = cursor.fetch_add(1);
        if (offset >= chunk_size) return;
        const long index = chunk_begin + offset;
        try {
          result.records[index] = run_realization(ctx, index);
          slots[offset].curve_ege =
              transmission_curve(ctx, result.records[index], Flavor::kEge, result.grid);
          slots[offset].curve_cs =
              transmission_curve(ctx, result.records[index], Flavor::kCsege, result.grid);
        } catch (...) {
          slots[offset].error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int active = static_cast<int>(std::min<long>(workers, chunk_size));
    pool.reserve(active);
    for (int w = 0; w < active; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    // Index-ordered reduction; the first failing index aborts the run.
    for (long offset = 0; offset < chunk_size; ++offset) {
      const long index = chunk_begin + offset;
      if (slots[offset].error) {
        try {
          std::rethrow_exception(slots[offset].error);
        } catch (const std::exception& e) {
          throw ensemble_error(index, e.what());
        }
      }
      const RealizationPair& pair = result.records[index];
      for (size_t i = 0; i < points; ++i) {
        const double te = slots[offset].curve_ege[i];
        const double tc = slots[offset].curve_cs[i];
        sum_e[i] += te;
        sumsq_e[i] += te * te;
        sum_c[i] += tc;
        sumsq_c[i] += tc * tc;
      }
      result.tallies.commutator_max = std::max(result.tallies.commutator_max, pair.commutator_norm);
      for (Flavor f : {Flavor::kEge, Flavor::kCsege}) {
        const FlavorRecord& rec = pair.flavor(f);
        result.tallies.trace_residual_max =
            std::max(result.tallies.trace_residual_max, rec.trace_residual);
        result.tallies.weight_sum_max = std::max(result.tallies.weight_sum_max, rec.weight_sum_abs);
        result.tallies.im_range_excess_max =
            std::max(result.tallies.im_range_excess_max, rec.im_range_excess);
        result.tallies.t_bound_excess_max =
            std::max(result.tallies.t_bound_excess_max, rec.t_bound_excess);
      }
    }
  }

  double current_upper = 0.0;
  for (const RealizationPair& pair : result.records)
    current_upper = std::max({current_upper, pair.ege.current, pair.csege.current});

  result.ege = summarize_flavor(ctx, result.records, Flavor::kEge, sum_e, sumsq_e, current_upper);
  result.csege =
      summarize_flavor(ctx, result.records, Flavor::kCsege, sum_c, sumsq_c, current_upper);
  return result;
}

PairedComparison particle_hole_check(const CurrentSample& a, const CurrentSample& b,
                                     double z_threshold, double ks_coefficient) {
  if (a.l != b.l) throw config_error("l", "particle-hole comparison requires equal l");
  const bool goe_pair = a.k == a.n && b.k == b.n && b.n == a.l - a.n;
  const bool onebody_pair = a.k == 1 && b.k == 1 && b.n == a.l - a.n;
  if (!goe_pair && !onebody_pair)
    throw std::invalid_argument(
        "expected parameters (n,k=n) vs (l-n,k=l-n) or (n,k=1) vs (l-n,k=1)");
  if (a.currents.empty() || b.currents.empty())
    throw std::invalid_argument("empty current sample");

  PairedComparison cmp;
  const MeanSem ma = mean_sem(a.currents), mb = mean_sem(b.currents);
  cmp.mean_a = ma.mean;
  cmp.mean_b = mb.mean;
  cmp.pooled_se = std::sqrt(ma.sem * ma.sem + mb.sem * mb.sem);
  cmp.z = cmp.pooled_se > 0 ? std::abs(ma.mean - mb.mean) / cmp.pooled_se
                            : (ma.mean == mb.mean ? 0.0 : std::numeric_limits<double>::infinity());

  std::vector<double> xs = a.currents, ys = b.currents;
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    if (xs[i] <= ys[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(i / nx - j / ny));
  }
  cmp.ks_distance = d;
  cmp.ks_critical = ks_coefficient * std::sqrt((nx + ny) / (nx * ny));
  cmp.pass = cmp.z <= z_threshold && cmp.ks_distance <= cmp.ks_critical;
  return cmp;
}

}  // namespace egt
