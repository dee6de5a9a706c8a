#include "zonebal/rng.h"

#include <limits>

#include "zonebal/types.h"

namespace zonebal {

int64_t Rng::uniform(int64_t lo, int64_t hi) {
  if (lo > hi) throw InvariantViolation("Rng::uniform: lo > hi");
  const uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo);
  if (span == std::numeric_limits<uint64_t>::max()) {
    return static_cast<int64_t>(next());
  }
  const uint64_t range = span + 1;
  const uint64_t max = std::numeric_limits<uint64_t>::max();
  const uint64_t limit = max - (max % range + 1) % range;
  uint64_t x;
  do {
    x = next();
  } while (x > limit);
  return lo + static_cast<int64_t>(x % range);
}

}  // namespace zonebal
