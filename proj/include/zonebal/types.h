#ifndef ZONEBAL_TYPES_H_
#define ZONEBAL_TYPES_H_

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace zonebal {

using CpuId = int;
using TaskId = int;

// Simulated time in integer microseconds since simulation start.
struct SimTime {
  int64_t us = 0;

  constexpr SimTime() = default;
  constexpr explicit SimTime(int64_t v) : us(v) {}

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(int64_t d) const { return SimTime(us + d); }
  constexpr int64_t operator-(SimTime o) const { return us - o.us; }
};

// Raised when the simulator detects a broken internal invariant (scheduling
// into the past, double enqueue, dequeuing a running task, ...). These are
// logic errors: the run cannot continue meaningfully.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what)
      : std::logic_error(what) {}
};

}  // namespace zonebal

#endif  // ZONEBAL_TYPES_H_
