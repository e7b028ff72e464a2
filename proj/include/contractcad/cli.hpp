#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ccad::cli {

/// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kFindings = 1;  // violations, blockers, uncovered cases
inline constexpr int kFailure = 2;   // usage, I/O, integrity

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ccad::cli
