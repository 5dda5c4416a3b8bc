#pragma once

#include <iosfwd>

namespace gtvm::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kLoadError = 1;     // parse, link, validation or I/O error
inline constexpr int kRuntimeError = 2;  // failure while executing

/// Entry point of the `gtvm` tool, with the streams made explicit for tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gtvm::cli
