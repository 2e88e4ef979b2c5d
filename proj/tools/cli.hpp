// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#ifndef ANGSPOOF_TOOLS_CLI_HPP
#define ANGSPOOF_TOOLS_CLI_HPP

#include <iosfwd>

namespace angspoof::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "ANGSPOOF_OUTPUT_DIR";

/// Runs one subcommand (estimate, spoof, sweep, heatmap, rate). Returns 0 on
/// success, 1 on usage or config errors, 2 on numerical failure.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace angspoof::cli

#endif  // ANGSPOOF_TOOLS_CLI_HPP
