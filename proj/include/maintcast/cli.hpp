#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maintcast {

/// Exit codes: 0 success, 1 usage or configuration, 2 data error,
/// 3 internal invariant failure. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maintcast
