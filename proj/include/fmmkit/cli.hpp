#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fmmkit {

/// Runs the `fmmkit` command line. `args` excludes the program name.
/// Exit codes: 0 success, 1 verification or search failure, 2 usage or input error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace fmmkit
