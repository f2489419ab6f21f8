#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace truckpark {

inline constexpr const char* kToolVersion = "0.1.0";

/// Entry point of the `truckpark` command line. `args` excludes the program
/// name. Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace truckpark
