#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace corrnet::cli {

// Runs one subcommand. `args` excludes the program name. Returns the process
// exit status: 0 on success, 1 on a runtime failure (one-line diagnostic on
// `err`), 2 on a usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corrnet::cli
