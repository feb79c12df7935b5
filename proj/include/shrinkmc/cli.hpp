#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shrinkmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Entry point of the `shrinkmc` command line tool. `args` excludes the
/// program name. Messages go to `out` / `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shrinkmc::cli
