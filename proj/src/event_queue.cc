#include "zonebal/event_queue.h"

#include <sstream>

namespace zonebal {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string describe(const Event& e) {
  std::ostringstream os;
  os << e.at.us << " #" << e.seq << ' ';
  std::visit(
      Overloaded{
          [&](const event::Tick&) { os << "Tick"; },
          [&](const event::TaskWakeup& w) { os << "TaskWakeup task=" << w.task; },
          [&](const event::BurstEnd& b) {
            os << "BurstEnd cpu=" << b.cpu << " token=" << b.token;
          },
          [&](const event::TaskCreate& c) {
            os << "TaskCreate spawn=" << c.spawn_index;
          },
          [&](const event::LockRelease& l) { os << "LockRelease cpu=" << l.cpu; },
          [&](const event::SimEnd&) { os << "SimEnd"; },
      },
      e.kind);
  return os.str();
}

uint64_t EventQueue::schedule(SimTime at, EventKind kind) {
  if (at < now_) {
    std::ostringstream os;
    os << "event scheduled into the past: at=" << at.us
       << " clock=" << now_.us;
    throw InvariantViolation(os.str());
  }
  const uint64_t seq = next_seq_++;
  heap_.push(Event{at, seq, std::move(kind)});
  return seq;
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  now_ = e.at;
  return e;
}

void EventQueue::advance_to(SimTime t) {
  if (t < now_) throw InvariantViolation("clock moved backwards");
  now_ = t;
}

}  // namespace zonebal
