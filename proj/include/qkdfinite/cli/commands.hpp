#pragma once

#include <ostream>

namespace qkdfinite::cli {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitNonPositiveRate = 3;
inline constexpr int kExitIoFailure = 4;
inline constexpr int kExitValidationFailure = 5;

// Entry point shared by the executable and the tests. CSV goes to --out
// (or `out`); the run manifest goes next to it as <out>.manifest.json, or
// as a single JSON line on `err` when writing to `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qkdfinite::cli
