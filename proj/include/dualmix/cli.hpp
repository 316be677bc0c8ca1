#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dualmix {

/// Entry point of the `dualmix` command line tool. `args` excludes the
/// program name. Returns the process exit code: 0 success, 1 usage,
/// 2 data error, 3 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualmix
