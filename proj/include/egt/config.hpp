#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "egt/ensemble.hpp"

namespace egt {

struct JobConfig {
  int l = 0;
  int n = 0;
  int k = 0;
  double eta = 1.0;
  long ensemble_size = 1000;
  std::uint64_t master_seed = 1;
  CentroSampling centro_sampling = CentroSampling::kOrbit;
  int random_energies_per_sample = 10;
  int energy_grid_points = 1001;
  double rel_tol_current = 1e-6;
  int workers = 0;  // 0 = auto (hardware concurrency)
  std::string output_dir = ".";
  long dimension_cap = kDefaultDimensionCap;

  void validate() const;  // throws config_error naming the offending field
};

struct SweepConfig {
  JobConfig base;                          // l and shared fields; n,k ignored
  std::vector<std::pair<int, int>> pairs;  // (n, k) cells in run order

  void validate() const;
};

using KeyValues = std::map<std::string, std::string>;

// Flat key=value file; '#' starts a comment, blank lines are skipped.
KeyValues parse_key_value_file(const std::string& path);

// Build a config from file keys with command-line overrides applied on top.
// Unknown keys and malformed values raise config_error naming the key.
JobConfig job_config_from(const KeyValues& file_keys, const KeyValues& overrides);
SweepConfig sweep_config_from(const KeyValues& file_keys, const KeyValues& overrides);

// Effective config as the flat key set a config file would contain; embedded
// in summary.json so a run can be reproduced from its own output.
KeyValues job_config_to_keys(const JobConfig& config);

std::string to_string(CentroSampling sampling);

}  // namespace egt
