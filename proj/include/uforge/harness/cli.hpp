#pragma once

#include <ostream>

namespace uforge::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerification = 2;

/// Command-line entry point. Returns 0 on success, 1 on a usage error or a
/// missing or malformed artifact, 2 on a failed verification or a hash
/// mismatch.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uforge::harness
