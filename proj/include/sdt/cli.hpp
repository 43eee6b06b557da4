#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sdt::cli {

enum ExitCode : int { ok = 0, usage = 2, numerical = 3 };

/// Runs one command. `args` excludes the program name. Tables, reports and
/// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sdt::cli
