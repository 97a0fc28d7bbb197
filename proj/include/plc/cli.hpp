#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace plc {

/// Runs one command-line invocation (arguments without the program name).
/// Returns 0 on success, 1 on a domain error and 2 on a usage error; errors
/// are written as a single `error[CODE]: message` line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plc
