#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace impactlab::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";
/// Default config path for the analysis subcommands when --config is absent.
inline constexpr const char* kConfigEnv = "IMPACTLAB_CONFIG";

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 1 usage, 2 data validation, 3 numerical degeneracy.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace impactlab::cli
