#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace genmarket::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point behind `genmarket simulate|fit|eval|price|portfolio`.
/// Returns the process exit code; messages go to `out` / `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace genmarket::cli
