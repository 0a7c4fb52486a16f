#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mtbn {

/// Runs the `mtbn` command line. `args` excludes the program name. Returns
/// the process exit status: 0 success, 1 diagnostics or runtime error,
/// 2 usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mtbn
