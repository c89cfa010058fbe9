#pragma once

#include <iosfwd>

namespace pinflip::cli {

// Parses flags (and an optional --config file), dispatches to one subcommand and
// maps failures to exit codes: 2 validation, 3 capacity, 4 non-convergence,
// 1 anything else. Errors are written to `err` as a JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pinflip::cli
