#pragma once

#include <string>
#include <vector>

namespace corn {

// Command-line entry point, callable in-process for tests.
// Subcommands: backtest, consistency, selftest.
// Exit codes: 0 success, 1 configuration error, 2 data/I-O error,
// 3 a requested check failed (consistency verdict or selftest).
int cli_run(const std::vector<std::string>& args);

}  // namespace corn
