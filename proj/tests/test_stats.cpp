#include <doctest.h>

#include <cmath>

#include "egt/errors.hpp"
#include "egt/stats.hpp"

using namespace egt;

namespace {

JobConfig small_config() {
  JobConfig cfg;
  cfg.l = 6;
  cfg.n = 5;
  cfg.k = 3;
  cfg.ensemble_size = 40;
  cfg.master_seed = 77;
  cfg.random_energies_per_sample = 10;
  cfg.energy_grid_points = 101;
  return cfg;
}

bool records_equal(const FlavorRecord& a, const FlavorRecord& b) {
  if (a.current != b.current || a.re_span != b.re_span) return false;
  if ((a.poles - b.poles).cwiseAbs().maxCoeff() != 0.0) return false;
  if ((a.weights - b.weights).cwiseAbs().maxCoeff() != 0.0) return false;
  return a.t_at_res == b.t_at_res && a.t_at_random == b.t_at_random &&
         a.random_energies == b.random_energies;
}

}  // namespace

TEST_CASE("run_realization is deterministic and complete") {
  const EnsembleContext ctx = make_context(small_config());
  const RealizationPair a = run_realization(ctx, 3);
  const RealizationPair b = run_realization(ctx, 3);
  CHECK(records_equal(a.ege, b.ege));
  CHECK(records_equal(a.csege, b.csege));

  CHECK(a.ege.poles.size() == 6);
  CHECK(a.csege.poles.size() == 6);
  CHECK(a.ege.current >= 0.0);
  CHECK(a.csege.current >= 0.0);
  CHECK(a.commutator_norm <= 1e-12);
  for (double t : a.ege.t_at_res) {
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
  // every csEGE pole away from the real axis satisfies the tau law
  for (long j = 0; j < a.csege.poles.size(); ++j)
    if (std::abs(a.csege.poles(j).imag()) > kRealPoleCut)
      CHECK(a.csege.tau[j] >= 1.0 - 1e-6);
}

TEST_CASE("energy grid is symmetric and covers the pilot band") {
  const EnsembleContext ctx = make_context(small_config());
  const std::vector<double> grid = energy_grid(ctx);
  REQUIRE(grid.size() == 101);
  CHECK(grid.front() == -grid.back());
  CHECK(grid.back() > 5.0);  // at least the 5*eta margin
  for (size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}

TEST_CASE("run_ensemble determinism is independent of worker count") {
  JobConfig cfg = small_config();
  cfg.ensemble_size = 12;
  cfg.workers = 1;
  const EnsembleResult serial = run_ensemble(cfg);
  cfg.workers = 4;
  const EnsembleResult parallel = run_ensemble(cfg);
  CHECK(serial.ege.mean_current == parallel.ege.mean_current);
  CHECK(serial.csege.mean_current == parallel.csege.mean_current);
  CHECK(serial.ege.t_mean == parallel.ege.t_mean);
  CHECK(serial.csege.t_sem == parallel.csege.t_sem);
  for (long i = 0; i < cfg.ensemble_size; ++i) {
    CHECK(records_equal(serial.records[i].ege, parallel.records[i].ege));
    CHECK(records_equal(serial.records[i].csege, parallel.records[i].csege));
  }
}

TEST_CASE("size-1 ensemble equals its single realization") {
  JobConfig cfg = small_config();
  cfg.l = 4;
  cfg.n = 2;
  cfg.k = 1;
  cfg.ensemble_size = 1;
  const EnsembleResult result = run_ensemble(cfg);
  const EnsembleContext ctx = make_context(cfg);
  const RealizationPair pair = run_realization(ctx, 0);
  CHECK(result.ege.mean_current == pair.ege.current);
  CHECK(result.ege.sem_current == 0.0);
  const std::vector<double> curve = transmission_curve(ctx, pair, Flavor::kEge, result.grid);
  for (size_t i = 0; i < curve.size(); ++i) {
    CHECK(result.ege.t_mean[i] == doctest::Approx(curve[i]).epsilon(1e-15));
    CHECK(result.ege.t_sem[i] == 0.0);
  }
}

TEST_CASE("averaged transmission is reflection-symmetric within errors") {
  JobConfig cfg = small_config();
  cfg.l = 4;
  cfg.n = 3;
  cfg.k = 2;
  cfg.ensemble_size = 300;
  cfg.energy_grid_points = 41;
  const EnsembleResult result = run_ensemble(cfg);
  const size_t points = result.grid.size();
  for (size_t i = 0; i < points; ++i) {
    const size_t mirror = points - 1 - i;
    const double se =
        std::sqrt(result.ege.t_sem[i] * result.ege.t_sem[i] +
                  result.ege.t_sem[mirror] * result.ege.t_sem[mirror]);
    if (se == 0.0) continue;
    CHECK(std::abs(result.ege.t_mean[i] - result.ege.t_mean[mirror]) <= 4.0 * se);
  }
}

TEST_CASE("current_mode") {
  SUBCASE("delta-like input returns that value") {
    const ModeEstimate m = current_mode({2.5, 2.5, 2.5}, 100, 4.0);
    CHECK(m.location == 2.5);
  }

  SUBCASE("bimodal input picks the taller peak") {
    std::vector<double> xs;
    for (int i = 0; i < 30; ++i) xs.push_back(1.0 + 1e-3 * i);
    for (int i = 0; i < 50; ++i) xs.push_back(3.0 + 1e-3 * i);
    const ModeEstimate m = current_mode(xs, 100, 4.0);
    CHECK(m.bin_width == doctest::Approx(0.04));
    CHECK(std::abs(m.location - 3.02) < 0.05);
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(current_mode({}, 100, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(current_mode({1.0, 2.0}, 100, 0.0), std::invalid_argument);
  }
}

TEST_CASE("histograms") {
  SUBCASE("counts are conserved and edges are fixed") {
    const Histogram h = make_histogram({0.0, 0.1, 0.99, 1.0, 0.5}, 0.0, 1.0, kTransmissionBins);
    CHECK(h.total() == 5);
    CHECK(h.edges.size() == 51);
    CHECK(h.edges.front() == 0.0);
    CHECK(h.edges.back() == 1.0);
    CHECK(h.counts[49] == 2);  // 0.99 and 1.0 in the top [0.98, 1] bin
    CHECK(h.counts[0] == 1);
  }

  SUBCASE("all-zero transmissions land in the bottom bin") {
    const Histogram h = make_histogram(std::vector<double>(17, 0.0), 0.0, 1.0, 50);
    CHECK(h.counts[0] == 17);
    CHECK(h.total() == 17);
  }

  SUBCASE("density integrates to one") {
    const Histogram h = make_histogram({0.1, 0.2, 0.3, 0.8}, 0.0, 1.0, 10);
    const auto d = h.density();
    double mass = 0;
    for (size_t i = 0; i < d.size(); ++i) mass += d[i] * (h.edges[i + 1] - h.edges[i]);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tau statistics") {
  JobConfig cfg = small_config();
  cfg.ensemble_size = 50;
  const EnsembleResult result = run_ensemble(cfg);

  const TauStats cs = tau_statistics(result.records, Flavor::kCsege);
  CHECK(cs.min_tau >= 1.0 - 1e-6);
  CHECK(cs.hist.total() + cs.excluded + cs.defective_skipped ==
        50 * result.records.front().csege.poles.size());

  const TauStats ege = tau_statistics(result.records, Flavor::kEge);
  CHECK(ege.fraction_below_one > 0.5);

  SUBCASE("synthetic zero-weight pole has tau zero") {
    RealizationPair pair;
    pair.ege.poles.resize(1);
    pair.ege.weights.resize(1);
    pair.ege.poles << std::complex<double>(0.0, -1.0);
    pair.ege.weights << std::complex<double>(0.0, 0.0);
    pair.ege.tau = {0.0};
    const TauStats t = tau_statistics({pair}, Flavor::kEge);
    CHECK(t.min_tau == 0.0);
    CHECK(t.hist.total() == 1);
    CHECK(t.excluded == 0);
  }
}

TEST_CASE("scatter points stay inside the closed unit disk") {
  JobConfig cfg = small_config();
  cfg.ensemble_size = 30;
  const EnsembleResult result = run_ensemble(cfg);
  for (Flavor f : {Flavor::kEge, Flavor::kCsege}) {
    const auto points = scatter_green(result.records, f);
    CHECK(points.size() == 30u * 6u);
    for (const auto& z : points) CHECK(std::abs(z) <= 1.0 + 1e-8);
  }
  CHECK(scatter_green({}, Flavor::kEge).empty());
}

TEST_CASE("scatter on the dimer: value at the resonance energies") {
  // |2G(1)|^2 = 4/5 for the symmetric dimer with eta = 1; the analytic 2x2
  // inverse of (E - h) at E = 1 gives G_12 = 1/(2i - 1).
  const std::complex<double> g12 = 1.0 / std::complex<double>(-1.0, 2.0);
  const double expected = std::norm(2.0 * g12);
  CHECK(expected == doctest::Approx(0.8).epsilon(1e-12));

  Eigen::MatrixXd h(2, 2);
  h << 0, 1, 1, 0;
  const EffectiveHamiltonian eff = attach_leads(h, 0, 1, 1.0);
  const SpectralData sd = spectral_decompose(eff);
  for (double re : resonance_energies(sd)) {
    const std::complex<double> amp = green_spectral_amplitude(sd, re);
    CHECK(std::norm(amp) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(std::abs(amp) <= 1.0 + 1e-8);
  }
}

TEST_CASE("transmission histograms separate the top bin") {
  JobConfig cfg = small_config();
  cfg.ensemble_size = 60;
  const EnsembleResult result = run_ensemble(cfg);
  const Histogram cs = resonance_transmission_stats(result.records, Flavor::kCsege);
  const Histogram ege = resonance_transmission_stats(result.records, Flavor::kEge);
  CHECK(cs.total() == 60 * 6);
  CHECK(ege.total() == 60 * 6);
  CHECK(cs.edges[49] == doctest::Approx(0.98));
  // centrosymmetry concentrates resonance transmissions near one
  CHECK(cs.counts[49] > ege.counts[49]);

  const Histogram rnd = random_energy_transmission_stats(result.records, Flavor::kCsege);
  CHECK(rnd.total() == 60 * 10);
}

TEST_CASE("particle_hole_check") {
  SUBCASE("identical samples have zero distance") {
    CurrentSample a{6, 2, 2, {1.0, 2.0, 3.0, 4.0}};
    CurrentSample b{6, 4, 4, {1.0, 2.0, 3.0, 4.0}};
    const PairedComparison cmp = particle_hole_check(a, b);
    CHECK(cmp.z == 0.0);
    CHECK(cmp.ks_distance == 0.0);
    CHECK(cmp.pass);
  }

  SUBCASE("mismatched l is rejected") {
    CurrentSample a{6, 2, 2, {1.0}};
    CurrentSample b{8, 6, 6, {1.0}};
    CHECK_THROWS_AS(particle_hole_check(a, b), config_error);
  }

  SUBCASE("non-particle-hole parameter pairs are rejected") {
    CurrentSample a{6, 2, 2, {1.0}};
    CurrentSample b{6, 3, 3, {1.0}};
    CHECK_THROWS_AS(particle_hole_check(a, b), std::invalid_argument);
  }

  SUBCASE("clearly different distributions fail") {
    CurrentSample a{6, 1, 1, {}};
    CurrentSample b{6, 5, 1, {}};
    for (int i = 0; i < 400; ++i) {
      a.currents.push_back(1.0 + 0.001 * (i % 7));
      b.currents.push_back(5.0 + 0.001 * (i % 7));
    }
    CHECK_FALSE(particle_hole_check(a, b).pass);
  }
}

TEST_CASE("ensemble failure reports the realization index") {
  JobConfig cfg = small_config();
  cfg.l = 4;
  cfg.n = 2;
  cfg.k = 1;
  cfg.ensemble_size = 3;
  cfg.rel_tol_current = 1e-2;  // valid; the invalid part is the basis below
  cfg.dimension_cap = 5;       // binomial(4,2) = 6 > 5
  CHECK_THROWS_AS(run_ensemble(cfg), config_error);
}
