#pragma once

// Command-line surface. Subcommands:
//   group     build one presentation preset and print its invariant report
//   classify  derive (m, n, e, k) candidates from measured field data
//   verify    run the closed-form structural checks over a parameter grid
//   tables    recompute the bundled measurement tables and diff them
//
// Exit codes: 0 success, 1 semantic failure (diffs, inconsistent rows,
// failed verification), 2 usage or parse failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace ppg {

// Testable entry point; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppg
