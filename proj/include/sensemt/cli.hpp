#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sensemt::cli {

/// Runs one subcommand. Output and diagnostics go to the given streams.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace sensemt::cli
