#pragma once

#include <string>
#include <vector>

namespace mapcore::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs the mapcore command line. args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace mapcore::cli
