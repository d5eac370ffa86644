// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace indc::cli {

/// Exit codes of run().
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_numerical = 2;

/// Command-line entry point. `args` excludes the program name. Subcommands:
/// tableau, solve, converge, compose, stability. Errors go to `err`, as one
/// JSON object when --json-errors is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace indc::cli
