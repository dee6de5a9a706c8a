#ifndef ZONEBAL_CLI_H_
#define ZONEBAL_CLI_H_

#include <iosfwd>

namespace zonebal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;

// Entry point of the `zonebal` tool:
//   zonebal run <scenario.json> [--policy P] [--seed N] [-o DIR] [--duration-us N]
//   zonebal compare <scenario.json> <policy> <policy>... [--seed N] [-o DIR]
//   zonebal sweep <scenario.json> --axis {spot,cache_penalty_us,n_cpu_hogs}
//                 --values v1,v2,... [--policy P] [--seed N] [-o DIR]
// The output directory defaults to $ZONEBAL_OUT, then "out".
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace zonebal::cli

#endif  // ZONEBAL_CLI_H_
