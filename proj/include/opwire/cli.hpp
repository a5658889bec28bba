#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace opwire {

/// Command-line entry point, also callable in-process for tests.
/// `args` excludes the program name. Exit codes: 0 = success / property
/// holds, 1 = property violated (counterexample on `out`), 2 = input error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opwire
