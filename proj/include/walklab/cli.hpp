#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace walklab {

// Runs one CLI invocation. Exit codes: 0 success, 2 validation/precondition
// error, 3 analysis infeasible at this size/mode. Output files are written
// to a temporary path and renamed, so a failed run never leaves partial
// artifacts behind.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace walklab
