#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfp {

// Entry point of the `mfp` tool. args excludes the program name.
// Returns 0 on success, 1 on usage errors and 2 on runtime errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfp
