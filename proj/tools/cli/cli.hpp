#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hodgekit::cli {

/// Exit codes: 0 success, 1 domain error (error JSON written) or failed
/// corpus-test, 2 usage error.
enum ExitCode : int { ok = 0, domain_failure = 1, usage = 2 };

/// Runs one command line (without the program name). Reports go to `out`
/// unless --output names a file; usage messages go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hodgekit::cli
