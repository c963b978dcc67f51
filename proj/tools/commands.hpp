// Command-line front end. Exit codes: 0 success, 1 verification failed,
// 2 invalid flags or config, 3 solver inconsistency.

#ifndef SHORTLIST_TOOLS_COMMANDS_HPP_
#define SHORTLIST_TOOLS_COMMANDS_HPP_

#include <iosfwd>

namespace shortlist::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitBadInput = 2;
inline constexpr int kExitSolver = 3;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace shortlist::cli

#endif  // SHORTLIST_TOOLS_COMMANDS_HPP_
