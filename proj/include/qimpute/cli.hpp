#pragma once

#include <iosfwd>

namespace qimpute {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 configuration or usage error, 2 data or I/O error
// (including a failed final validation), 3 optimization failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qimpute
