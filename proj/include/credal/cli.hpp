#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace credal::cli {

/// Exit codes of `credal`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertionFailed = 1;  // reproduce: some assertion failed
inline constexpr int kExitParse = 2;            // bad arguments or malformed input
inline constexpr int kExitPrecondition = 3;     // library precondition violated

/// Runs one command. `args` excludes the program name. The JSON report goes
/// to `out`, the human summary and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::vector<std::string> verbs();

}  // namespace credal::cli
