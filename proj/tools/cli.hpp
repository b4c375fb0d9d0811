#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rydberg::cli {

/// Exit codes: 0 success, 1 usage or I/O error, 2 numerical failure.
/// Errors are reported on `err` as a single line `ERROR <code>: <message>`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Reads `key = value` lines (blank lines and `#` comments skipped) and
/// returns them as `--key=value` arguments.
std::vector<std::string> read_config_args(const std::string& path);

} // namespace rydberg::cli
