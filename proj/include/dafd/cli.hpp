#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dafd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitContract = 2;
inline constexpr int kExitIo = 3;

/// Entry point of the dafd tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dafd
