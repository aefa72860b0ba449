#ifndef ACCENTNET_CLI_HPP
#define ACCENTNET_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace accentnet::cli {

// Runs one CLI invocation (args without the program name). Returns the
// process exit code: 0 success, 1 usage error, 2 data error, 3 internal
// invariant violation.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace accentnet::cli

#endif
