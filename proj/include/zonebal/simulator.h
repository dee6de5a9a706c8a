#ifndef ZONEBAL_SIMULATOR_H_
#define ZONEBAL_SIMULATOR_H_

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "zonebal/balancer.h"
#include "zonebal/event_queue.h"
#include "zonebal/metrics.h"
#include "zonebal/rng.h"
#include "zonebal/scenario.h"
#include "zonebal/scheduler.h"

namespace zonebal {

// One simulation run: clock, event queue, seeded generator, scheduler,
// the selected balancer and the metrics they feed. Single-threaded.
class Simulator : public EventSink {
 public:
  using Observer = std::function<void(const Event&, Simulator&)>;

  // Builds the machine and loads the scenario's workload at t = 0.
  explicit Simulator(const Scenario& scenario);

  void post(SimTime at, EventKind kind) override;

  // Dispatches every queued event with at <= end and leaves the clock at end.
  void step_until(SimTime end);
  // step_until(end), then emits the closing SimEnd.
  const MetricsStore& run_until(SimTime end);
  const MetricsStore& run() { return run_until(SimTime(scenario_.duration_us)); }

  // Called after every dispatched event.
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  SimTime now() const { return queue_.now(); }
  const Scenario& scenario() const { return scenario_; }
  Scheduler& scheduler() { return *sched_; }
  Balancer& balancer() { return *balancer_; }
  MetricsStore& metrics() { return metrics_; }
  const MetricsStore& metrics() const { return metrics_; }
  Rng& rng() { return rng_; }

  uint64_t events_dispatched() const { return dispatched_; }
  // FNV-1a over every dispatched (at, seq, kind, payload).
  uint64_t trace_hash() const { return trace_hash_; }
  // Most recent dispatched events, oldest first.
  std::vector<std::string> recent_trace() const { return {recent_.begin(), recent_.end()}; }

  bool ended() const { return ended_; }

 private:
  void dispatch(const Event& e);
  void record(const Event& e);

  Scenario scenario_;
  EventQueue queue_;
  Rng rng_;
  MetricsStore metrics_;
  std::unique_ptr<Scheduler> sched_;
  std::unique_ptr<Balancer> balancer_;
  Observer observer_;
  uint64_t spawned_ = 0;
  uint64_t dispatched_ = 0;
  uint64_t trace_hash_ = 0xcbf29ce484222325ULL;
  std::deque<std::string> recent_;
  bool ended_ = false;
};

std::unique_ptr<Balancer> make_balancer(const Scenario& s);

// A run that hit an internal invariant violation, with the trace tail.
class SimulationFailure : public std::runtime_error {
 public:
  SimulationFailure(const std::string& what, std::vector<std::string> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<std::string>& trace() const { return trace_; }

 private:
  std::vector<std::string> trace_;
};

struct RunArtifacts {
  RunReport report;
  std::vector<LatencySample> samples;
  uint64_t trace_hash = 0;
};

// Runs the scenario to its duration. Throws SimulationFailure.
RunArtifacts run_scenario(const Scenario& s);

}  // namespace zonebal

#endif  // ZONEBAL_SIMULATOR_H_
