#include "egt/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "egt/errors.hpp"

namespace egt {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(key, "expected an integer, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(key, "expected an unsigned integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(key, "expected a number, got '" + value + "'");
  }
}

const std::set<std::string> kJobKeys{
    "l",       "n",           "k",           "eta",           "ensemble_size",
    "master_seed", "centro_sampling", "random_energies_per_sample", "energy_grid_points",
    "rel_tol_current", "workers", "output_dir", "dimension_cap"};

void apply_keys(JobConfig& config, const KeyValues& keys, bool allow_pairs) {
  for (const auto& [key, value] : keys) {
    if (key == "l")
      config.l = static_cast<int>(parse_long(key, value));
    else if (key == "n")
      config.n = static_cast<int>(parse_long(key, value));
    else if (key == "k")
      config.k = static_cast<int>(parse_long(key, value));
    else if (key == "eta")
      config.eta = parse_double(key, value);
    else if (key == "ensemble_size")
      config.ensemble_size = parse_long(key, value);
    else if (key == "master_seed")
      config.master_seed = parse_u64(key, value);
    else if (key == "centro_sampling") {
      if (value == "average")
        config.centro_sampling = CentroSampling::kAverage;
      else if (value == "orbit")
        config.centro_sampling = CentroSampling::kOrbit;
      else
        throw config_error(key, "expected 'average' or 'orbit', got '" + value + "'");
    } else if (key == "random_energies_per_sample")
      config.random_energies_per_sample = static_cast<int>(parse_long(key, value));
    else if (key == "energy_grid_points")
      config.energy_grid_points = static_cast<int>(parse_long(key, value));
    else if (key == "rel_tol_current")
      config.rel_tol_current = parse_double(key, value);
    else if (key == "workers") {
      if (value == "auto")
        config.workers = 0;
      else
        config.workers = static_cast<int>(parse_long(key, value));
    } else if (key == "output_dir")
      config.output_dir = value;
    else if (key == "dimension_cap")
      config.dimension_cap = parse_long(key, value);
    else if (key == "pairs" && allow_pairs)
      ;  // handled by sweep_config_from
    else
      throw config_error(key, "unknown key");
  }
}

}  // namespace

void JobConfig::validate() const {
  if (l < 2 || l > kMaxModes) throw config_error("l", "must satisfy 2 <= l <= 64");
  if (n < 1 || n >= l) throw config_error("n", "must satisfy 1 <= n < l");
  if (k < 1 || k > n) throw config_error("k", "must satisfy 1 <= k <= n");
  if (!(eta > 0)) throw config_error("eta", "must be positive");
  if (ensemble_size < 1) throw config_error("ensemble_size", "must be at least 1");
  if (random_energies_per_sample < 0)
    throw config_error("random_energies_per_sample", "must be nonnegative");
  if (energy_grid_points < 2) throw config_error("energy_grid_points", "must be at least 2");
  if (!(rel_tol_current > 0) || rel_tol_current > 1e-2)
    throw config_error("rel_tol_current", "must lie in (0, 1e-2]");
  if (workers < 0) throw config_error("workers", "must be 'auto' or a nonnegative integer");
  if (dimension_cap < 2) throw config_error("dimension_cap", "must be at least 2");
  if (binomial(l, n) > dimension_cap)
    throw config_error("dimension_cap", "basis dimension binomial(l,n) = " +
                                            std::to_string(binomial(l, n)) + " exceeds cap " +
                                            std::to_string(dimension_cap));
}

void SweepConfig::validate() const {
  if (pairs.empty()) throw config_error("pairs", "sweep has no (n,k) cells");
  for (const auto& [n, k] : pairs) {
    JobConfig cell = base;
    cell.n = n;
    cell.k = k;
    cell.validate();
  }
}

KeyValues parse_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config", "cannot open config file '" + path + "'");
  KeyValues keys;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw config_error("config",
                         "line " + std::to_string(line_no) + " is not of the form key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw config_error("config", "line " + std::to_string(line_no) + " has an empty key");
    keys[key] = value;
  }
  return keys;
}

JobConfig job_config_from(const KeyValues& file_keys, const KeyValues& overrides) {
  JobConfig config;
  apply_keys(config, file_keys, false);
  apply_keys(config, overrides, false);
  config.validate();
  return config;
}

SweepConfig sweep_config_from(const KeyValues& file_keys, const KeyValues& overrides) {
  SweepConfig sweep;
  apply_keys(sweep.base, file_keys, true);
  apply_keys(sweep.base, overrides, true);

  std::string pairs_value = "all";
  if (auto it = file_keys.find("pairs"); it != file_keys.end()) pairs_value = it->second;
  if (auto it = overrides.find("pairs"); it != overrides.end()) pairs_value = it->second;

  if (pairs_value == "all") {
    if (sweep.base.l < 2) throw config_error("l", "must satisfy 2 <= l <= 64");
    for (int n = 1; n < sweep.base.l; ++n)
      for (int k = 1; k <= n; ++k) sweep.pairs.emplace_back(n, k);
  } else {
    // whitespace-separated n:k entries, e.g. "pairs = 5:2 5:3"
    std::istringstream in(pairs_value);
    std::string token;
    while (in >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        throw config_error("pairs", "expected n:k entries or 'all', got '" + token + "'");
      sweep.pairs.emplace_back(static_cast<int>(parse_long("pairs", token.substr(0, colon))),
                               static_cast<int>(parse_long("pairs", token.substr(colon + 1))));
    }
  }
  // Cell validation needs placeholder n,k on the base config.
  sweep.validate();
  return sweep;
}

KeyValues job_config_to_keys(const JobConfig& config) {
  KeyValues keys;
  keys["l"] = std::to_string(config.l);
  keys["n"] = std::to_string(config.n);
  keys["k"] = std::to_string(config.k);
  {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", config.eta);
    keys["eta"] = buf;
    std::snprintf(buf, sizeof buf, "%.17g", config.rel_tol_current);
    keys["rel_tol_current"] = buf;
  }
  keys["ensemble_size"] = std::to_string(config.ensemble_size);
  keys["master_seed"] = std::to_string(config.master_seed);
  keys["centro_sampling"] = to_string(config.centro_sampling);
  keys["random_energies_per_sample"] = std::to_string(config.random_energies_per_sample);
  keys["energy_grid_points"] = std::to_string(config.energy_grid_points);
  keys["workers"] = config.workers == 0 ? "auto" : std::to_string(config.workers);
  keys["output_dir"] = config.output_dir;
  keys["dimension_cap"] = std::to_string(config.dimension_cap);
  return keys;
}

std::string to_string(CentroSampling sampling) {
  return sampling == CentroSampling::kAverage ? "average" : "orbit";
}

}  // namespace egt
