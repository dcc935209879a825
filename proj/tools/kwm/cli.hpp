#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kwm::cli {

/// Runs one subcommand. `args` excludes the program name. The JSON report goes
/// to `out`, a one-line summary and errors to `err`; input paths given as "-"
/// read from `in`. Returns 0 on success or a valid input, 1 when the input is
/// mathematically invalid, 2 on usage, parse or numeric errors.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace kwm::cli
