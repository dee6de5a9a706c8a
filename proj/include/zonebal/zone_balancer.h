#ifndef ZONEBAL_ZONE_BALANCER_H_
#define ZONEBAL_ZONE_BALANCER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "zonebal/balancer.h"
#include "zonebal/migration.h"

namespace zonebal {

inline constexpr int kColdThreshold = 30;
inline constexpr int kHotThreshold = 80;

enum class Zone { kCold, kWarm, kHot };

// util <= 30 is cold, util > 80 is hot, warm in between. Throws
// std::out_of_range outside [0, 100].
Zone zone_classify(double util);

enum class Spot { kLow = 30, kMid = 50, kHigh = 80 };

struct ZonePolicy {
  enum class Kind { kCold, kWarm, kHot };

  Kind kind = Kind::kWarm;
  Spot spot = Spot::kHigh;

  static ZonePolicy cold() { return {Kind::kCold, Spot::kLow}; }
  static ZonePolicy warm(Spot s) { return {Kind::kWarm, s}; }
  static ZonePolicy hot() { return {Kind::kHot, Spot::kHigh}; }

  // cold | warm_low | warm_mid | warm_high | hot
  static std::optional<ZonePolicy> parse(std::string_view name);
  std::string name() const;

  bool is_warm() const { return kind == Kind::kWarm; }
  // The gate fires strictly above this utilization.
  int threshold() const;

  bool operator==(const ZonePolicy&) const = default;
};

struct ZoneConfig {
  ZonePolicy policy;
  bool balance_cpus_avg_enable = false;
  int64_t balance_weight_prize_time_us = 5'000'000;
  int64_t balance_weight_punish_time_us = 5'000'000;
  int weight_step = 5;

  void validate() const;
};

// Usage adjusted by the weight score and held inside [low spot, high spot].
double effective_usage(double usage_pct, int weight_score);
inline double effective_usage(const Task& t) { return effective_usage(t.usage_pct, t.weight.score); }

// Scores stay within +/- (high spot - low spot); beyond that the clamp in
// effective_usage makes further steps meaningless.
inline constexpr int kMaxWeightMagnitude =
    static_cast<int>(Spot::kHigh) - static_cast<int>(Spot::kLow);

// One accounting step of the prize/punish rules for a task with `usage_pct`
// against `spot`:
//  - an above-spot episode that lasts a full prize window earns -step and
//    starts a new window;
//  - an episode that ends shorter than the punish time earns +step.
void update_weight(WeightState& w, double usage_pct, int spot, SimTime now, const ZoneConfig& cfg);

namespace trigger {
struct TaskCreated {
  TaskId task;
  CpuId creator;
};
struct IdleWakeup {
  TaskId task;
};
struct TickBusiestMember {
  CpuId cpu;
};
}  // namespace trigger

using TriggerEvent =
    std::variant<trigger::TaskCreated, trigger::IdleWakeup, trigger::TickBusiestMember>;

struct TriggerResult {
  BalanceOutcome outcome;
  // Placement decision for TaskCreated / IdleWakeup.
  std::optional<CpuId> cpu;
};

// Event-driven balancer gated on operation zones. It does nothing
// periodically: decisions happen only when a task is created, a sleeping
// task wakes, or on a tick for the member of the busiest group.
class ZoneBalancer : public Balancer {
 public:
  ZoneBalancer(const ZoneConfig& cfg, const LockCostModel& cost);

  std::string policy_name() const override { return cfg_.policy.name(); }
  void on_tick(Scheduler& sched, SimTime now) override;
  CpuId place_new_task(Scheduler& sched, TaskId id, CpuId creator, SimTime now) override;
  CpuId select_wakeup_cpu(Scheduler& sched, TaskId id, SimTime now) override;

  TriggerResult on_trigger(const TriggerEvent& ev, Scheduler& sched, const LoadSnapshot& loads,
                           SimTime now);

  // The utilization the gate compares: the domain average in averaged mode,
  // otherwise the busiest CPU's own load.
  double gate_input(const LoadSnapshot& loads) const;
  bool gate(const LoadSnapshot& loads) const;

  bool eligible(const Task& t) const;
  std::optional<TaskId> select_victim(const Scheduler& sched, CpuId src) const;

  void update_weights(Scheduler& sched, SimTime now) const;

  const ZoneConfig& config() const { return cfg_; }

 private:
  BalanceOutcome balance_busiest(Scheduler& sched, const LoadSnapshot& loads, CpuId src,
                                 SimTime now);

  ZoneConfig cfg_;
  LockCostModel cost_;
};

}  // namespace zonebal

#endif  // ZONEBAL_ZONE_BALANCER_H_
