#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace porehom {

// Runs one CLI invocation; args[0] is the program name. Returns 0 on
// success, 1 for a failed run (one "error [kind]: ..." line on err) and 2 for
// usage errors.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace porehom
