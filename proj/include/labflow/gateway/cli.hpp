#pragma once

#include <iosfwd>

namespace labflow::gateway {

// Exit codes shared by every subcommand.
inline constexpr int kExitCompleted = 0;
inline constexpr int kExitAborted = 2;
inline constexpr int kExitSuspended = 3;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitInput = 66;
inline constexpr int kExitUnavailable = 69;
inline constexpr int kExitInternal = 70;

// Entry point of the `labflow` tool. `in` feeds console-mode decisions.
int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace labflow::gateway
