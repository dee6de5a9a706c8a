#ifndef ZONEBAL_RNG_H_
#define ZONEBAL_RNG_H_

#include <cstdint>
#include <random>

namespace zonebal {

// Seeded generator for everything random in a run.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard distributions are not (their algorithms vary between
// library implementations), so bounded draws are done here by rejection
// sampling to keep traces identical across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi]. Requires lo <= hi.
  int64_t uniform(int64_t lo, int64_t hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace zonebal

#endif  // ZONEBAL_RNG_H_
