#include "egt/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "egt/errors.hpp"

namespace egt {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json config_json(const JobConfig& config) {
  json j;
  for (const auto& [key, value] : job_config_to_keys(config)) j[key] = value;
  return j;
}

json flavor_json(const FlavorSummary& s, double band_halfwidth) {
  return json{{"mean_current", s.mean_current},
              {"sem", s.sem_current},
              {"mode", s.mode.location},
              {"bin_width", s.mode.bin_width},
              {"band_halfwidth", band_halfwidth},
              {"defective_count", s.defective_count}};
}

void write_summary_json(const EnsembleResult& result, const fs::path& path) {
  const double band_halfwidth = result.grid.empty() ? 0.0 : result.grid.back();
  json j{{"config", config_json(result.config)},
         {"flavor_summaries",
          {{"ege", flavor_json(result.ege, band_halfwidth)},
           {"csege", flavor_json(result.csege, band_halfwidth)}}},
         {"invariant_report",
          {{"commutator_max", result.tallies.commutator_max},
           {"trace_residual_max", result.tallies.trace_residual_max},
           {"weight_sum_max", result.tallies.weight_sum_max},
           {"im_range_excess_max", result.tallies.im_range_excess_max},
           {"t_bound_excess_max", result.tallies.t_bound_excess_max},
           {"quadrature_fallbacks_ege", result.ege.quadrature_fallbacks},
           {"quadrature_fallbacks_csege", result.csege.quadrature_fallbacks},
           {"tau_excluded_ege", result.ege.tau.excluded},
           {"tau_excluded_csege", result.csege.tau.excluded}}}};
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_transmission_csv(const EnsembleResult& result, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << "energy,t_mean_ege,t_sem_ege,t_mean_csege,t_sem_csege\n";
  for (size_t i = 0; i < result.grid.size(); ++i)
    out << fmt17(result.grid[i]) << ',' << fmt17(result.ege.t_mean[i]) << ','
        << fmt17(result.ege.t_sem[i]) << ',' << fmt17(result.csege.t_mean[i]) << ','
        << fmt17(result.csege.t_sem[i]) << '\n';
}

void write_currents_csv(const EnsembleResult& result, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << "index,seed,current_ege,current_csege\n";
  for (const RealizationPair& pair : result.records)
    out << pair.index << ',' << pair.seed.child << ',' << fmt17(pair.ege.current) << ','
        << fmt17(pair.csege.current) << '\n';
}

void write_spectral_csv(const EnsembleResult& result, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << "index,flavor,j,re_eps,im_eps,re_ups,im_ups,tau,t_at_res\n";
  for (const RealizationPair& pair : result.records)
    for (Flavor flavor : {Flavor::kEge, Flavor::kCsege}) {
      const FlavorRecord& rec = pair.flavor(flavor);
      for (long j = 0; j < rec.poles.size(); ++j)
        out << pair.index << ',' << flavor_name(flavor) << ',' << (j + 1) << ','
            << fmt17(rec.poles(j).real()) << ',' << fmt17(rec.poles(j).imag()) << ','
            << fmt17(rec.weights(j).real()) << ',' << fmt17(rec.weights(j).imag()) << ','
            << fmt17(rec.tau[j]) << ',' << fmt17(rec.t_at_res[j]) << '\n';
    }
}

json cell_json(const EnsembleResult& result) {
  const double band_halfwidth = result.grid.empty() ? 0.0 : result.grid.back();
  return json{{"n", result.config.n},
              {"k", result.config.k},
              {"ege",
               {{"mean_current", result.ege.mean_current},
                {"sem", result.ege.sem_current},
                {"mode", result.ege.mode.location},
                {"bin_width", result.ege.mode.bin_width},
                {"band_width", result.ege.mean_re_span},
                {"band_halfwidth", band_halfwidth}}},
              {"csege",
               {{"mean_current", result.csege.mean_current},
                {"sem", result.csege.sem_current},
                {"mode", result.csege.mode.location},
                {"bin_width", result.csege.mode.bin_width},
                {"band_width", result.csege.mean_re_span},
                {"band_halfwidth", band_halfwidth}}}};
}

}  // namespace

void write_outputs(const EnsembleResult& result, const std::string& dir) {
  const fs::path base(dir);
  fs::create_directories(base);
  write_summary_json(result, base / "summary.json");
  write_transmission_csv(result, base / "transmission_avg.csv");
  write_currents_csv(result, base / "currents.csv");
  write_spectral_csv(result, base / "spectral.csv");
}

namespace {

int classify_and_report(std::ostream& log, const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const config_error& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ensemble_error& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const numerical_error& e) {
    log << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    log << "i/o failure: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    log << "i/o failure: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace

int cmd_run(const std::string& config_path, const KeyValues& overrides, std::ostream& log) {
  try {
    const JobConfig config = job_config_from(parse_key_value_file(config_path), overrides);
    const EnsembleResult result = run_ensemble(config);
    write_outputs(result, config.output_dir);
    log << "wrote " << config.output_dir << " (" << config.ensemble_size << " realizations, N="
        << binomial(config.l, config.n) << ")\n";
    return kExitOk;
  } catch (...) {
    return classify_and_report(log, std::current_exception());
  }
}

int cmd_sweep(const std::string& config_path, const KeyValues& overrides, std::ostream& log) {
  try {
    const SweepConfig sweep = sweep_config_from(parse_key_value_file(config_path), overrides);
    const fs::path base(sweep.base.output_dir);
    fs::create_directories(base);
    json cells = json::array();
    for (const auto& [n, k] : sweep.pairs) {
      JobConfig cell = sweep.base;
      cell.n = n;
      cell.k = k;
      const fs::path cell_dir = base / ("n" + std::to_string(n) + "_k" + std::to_string(k));
      cell.output_dir = cell_dir.string();
      try {
        const EnsembleResult result = run_ensemble(cell);
        write_outputs(result, cell.output_dir);
        cells.push_back(cell_json(result));
        log << "cell n=" << n << " k=" << k << ": <I>_ege=" << result.ege.mean_current
            << " <I>_csege=" << result.csege.mean_current << "\n";
      } catch (const config_error&) {
        throw;
      } catch (const std::exception& e) {
        throw std::runtime_error("cell n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                 ": " + e.what());
      }
    }
    json grid{{"config", config_json(sweep.base)}, {"cells", cells}};
    std::ofstream out(base / "grid_summary.json");
    if (!out) throw std::ios_base::failure("cannot write grid_summary.json");
    out << grid.dump(2) << "\n";
    return kExitOk;
  } catch (...) {
    return classify_and_report(log, std::current_exception());
  }
}

int cmd_check(const std::string& config_path, const KeyValues& overrides,
              const CheckOptions& options, std::ostream& out) {
  try {
    KeyValues file_keys;
    if (!config_path.empty()) file_keys = parse_key_value_file(config_path);
    if (!file_keys.count("l") && !overrides.count("l")) {
      file_keys["l"] = "6";
      file_keys["n"] = "5";
      file_keys["k"] = "3";
    }
    const JobConfig config = job_config_from(file_keys, overrides);
    const std::vector<CheckItem> items = run_invariant_checks(config, options);
    bool all_pass = true;
    json checks = json::array();
    for (const CheckItem& item : items) {
      all_pass = all_pass && item.pass;
      checks.push_back(json{{"name", item.name},
                            {"pass", item.pass},
                            {"measured", item.measured},
                            {"threshold", item.threshold},
                            {"note", item.note}});
    }
    out << json{{"config", config_json(config)}, {"checks", checks}, {"all_pass", all_pass}}
               .dump(2)
        << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
  } catch (...) {
    return classify_and_report(out, std::current_exception());
  }
}

}  // namespace egt
