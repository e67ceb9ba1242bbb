#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mindle/config.hpp"

namespace mindle {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `mindle` command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env);

}  // namespace mindle
