#pragma once

#include <iosfwd>

namespace fiwalk::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAssertion = 2;

/// Runs the fiwalk command line. Subcommands: families, analyze, quotient.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fiwalk::cli
