#pragma once

#include <iosfwd>

namespace rbsim {

// Exit status: 0 success, 1 validation or verification failure,
// 2 numerical non-convergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rbsim
