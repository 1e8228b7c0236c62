#pragma once

#include <iosfwd>
#include <string>

#include "egt/check.hpp"
#include "egt/config.hpp"
#include "egt/stats.hpp"

namespace egt {

// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 I/O failure, 4 failed invariant checks.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitCheckFailed = 4;

int cmd_run(const std::string& config_path, const KeyValues& overrides, std::ostream& log);
int cmd_sweep(const std::string& config_path, const KeyValues& overrides, std::ostream& log);
// config_path may be empty; defaults then apply (l=6, n=5, k=3).
int cmd_check(const std::string& config_path, const KeyValues& overrides,
              const CheckOptions& options, std::ostream& out);

// Output writers, exposed for tests. All numbers are serialized with 17
// significant digits so a double round-trips exactly.
void write_outputs(const EnsembleResult& result, const std::string& dir);

}  // namespace egt
