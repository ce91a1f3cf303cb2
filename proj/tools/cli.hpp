#pragma once

#include <iosfwd>

namespace zspa::cli {

/// Exit codes: 0 success, 1 data error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `zspa` executable; streams are injectable so the
/// command surface can be driven in-process.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zspa::cli
