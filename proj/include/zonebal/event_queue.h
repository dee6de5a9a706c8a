#ifndef ZONEBAL_EVENT_QUEUE_H_
#define ZONEBAL_EVENT_QUEUE_H_

#include <cstdint>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "zonebal/types.h"

namespace zonebal {

namespace event {
struct Tick {};
struct TaskWakeup {
  TaskId task;
};
// A running task's burst completes. `token` identifies the dispatch that
// scheduled it; a preemption in the meantime makes the event stale.
struct BurstEnd {
  CpuId cpu;
  uint64_t token;
};
struct TaskCreate {
  uint64_t spawn_index;
};
struct LockRelease {
  CpuId cpu;
};
struct SimEnd {};
}  // namespace event

using EventKind = std::variant<event::Tick, event::TaskWakeup, event::BurstEnd,
                               event::TaskCreate, event::LockRelease,
                               event::SimEnd>;

struct Event {
  SimTime at;
  uint64_t seq = 0;
  EventKind kind;
};

std::string describe(const Event& e);

// Min-queue on (at, seq). Sequence numbers are handed out in insertion order,
// so simultaneous events dispatch first-scheduled-first.
class EventQueue {
 public:
  // Throws InvariantViolation if `at` precedes the current clock.
  uint64_t schedule(SimTime at, EventKind kind);

  bool empty() const { return heap_.empty(); }
  size_t size() const { return heap_.size(); }
  const Event& top() const { return heap_.top(); }

  // Removes the head and advances the clock to its timestamp.
  Event pop();

  SimTime now() const { return now_; }
  void advance_to(SimTime t);

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_;
  uint64_t next_seq_ = 0;
};

}  // namespace zonebal

#endif  // ZONEBAL_EVENT_QUEUE_H_
