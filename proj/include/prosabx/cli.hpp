#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prosabx::cli {

// Exit codes: 0 success, 1 validation or runtime failure, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand. `args` excludes the program name. A one-line JSON
// summary goes to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "0..12", "3" or "0,2,4..6" into a sorted list of unique layers.
std::vector<int> parse_layer_spec(const std::string& spec);

}  // namespace prosabx::cli
