#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace padback::cli {

// Exit codes: 0 success, 1 invalid input (usage, validation, parse), 2 runtime
// failure (numeric divergence, I/O).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitRuntime = 2;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace padback::cli
