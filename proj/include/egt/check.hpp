#pragma once

#include <string>
#include <vector>

#include "egt/config.hpp"

namespace egt {

struct CheckItem {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct CheckOptions {
  long samples = 100;  // realizations per sampled check
  // Test hook: flips one sign of the k-particle exchange operator used for
  // centrosymmetric sampling, which must make the commutator check fail.
  bool inject_sign_error = false;
};

// Exact-invariant battery: dimer analytics, commutators, trace and sum
// rules, unitarity, metamorphic identities, representation equivalence, and
// the dense full-Fock oracle comparison.
std::vector<CheckItem> run_invariant_checks(const JobConfig& config, const CheckOptions& options);

}  // namespace egt
