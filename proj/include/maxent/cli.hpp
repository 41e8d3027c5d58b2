#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace maxent {

/// Exit status for malformed command lines.
inline constexpr int kUsageExit = 64;

/// Entry point of the `maxent` tool. args[0] is the program name. Results go
/// to `out`; failures are written to `err` as one JSON line. Returns 0, 1 for
/// validation and input errors, 2 for cap or budget errors, 64 for usage.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maxent
