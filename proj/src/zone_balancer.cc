#include "zonebal/zone_balancer.h"

#include <algorithm>
#include <stdexcept>

namespace zonebal {

Zone zone_classify(double util) {
  if (!(util >= 0.0 && util <= 100.0)) throw std::out_of_range("utilization outside [0, 100]");
  if (util <= kColdThreshold) return Zone::kCold;
  if (util > kHotThreshold) return Zone::kHot;
  return Zone::kWarm;
}

std::optional<ZonePolicy> ZonePolicy::parse(std::string_view name) {
  if (name == "cold") return cold();
  if (name == "warm_low") return warm(Spot::kLow);
  if (name == "warm_mid") return warm(Spot::kMid);
  if (name == "warm_high") return warm(Spot::kHigh);
  if (name == "hot") return hot();
  return std::nullopt;
}

std::string ZonePolicy::name() const {
  switch (kind) {
    case Kind::kCold: return "cold";
    case Kind::kHot: return "hot";
    case Kind::kWarm:
      switch (spot) {
        case Spot::kLow: return "warm_low";
        case Spot::kMid: return "warm_mid";
        case Spot::kHigh: return "warm_high";
      }
  }
  return "?";
}

int ZonePolicy::threshold() const {
  switch (kind) {
    case Kind::kCold: return kColdThreshold;
    case Kind::kHot: return kHotThreshold;
    case Kind::kWarm: return static_cast<int>(spot);
  }
  return kHotThreshold;
}

void ZoneConfig::validate() const {
  if (balance_weight_prize_time_us <= 0 || balance_weight_punish_time_us <= 0) {
    throw std::invalid_argument("weight prize/punish times must be positive");
  }
  if (weight_step <= 0) throw std::invalid_argument("weight_step must be positive");
}

double effective_usage(double usage_pct, int weight_score) {
  return std::clamp(usage_pct + weight_score, static_cast<double>(Spot::kLow),
                    static_cast<double>(Spot::kHigh));
}

void update_weight(WeightState& w, double usage_pct, int spot, SimTime now, const ZoneConfig& cfg) {
  if (usage_pct > spot) {
    if (!w.high_usage_since) {
      w.high_usage_since = now;
      w.prize_window_start = now;
    } else if (now - w.prize_window_start >= cfg.balance_weight_prize_time_us) {
      w.score -= cfg.weight_step;
      w.prize_window_start = now;
    }
  } else if (w.high_usage_since) {
    if (now - w.prize_window_start >= cfg.balance_weight_prize_time_us) {
      // The window closed on this very sample.
      w.score -= cfg.weight_step;
    } else if (now - *w.high_usage_since < cfg.balance_weight_punish_time_us) {
      w.score += cfg.weight_step;
    }
    w.high_usage_since.reset();
  }
  w.score = std::clamp(w.score, -kMaxWeightMagnitude, kMaxWeightMagnitude);
}

ZoneBalancer::ZoneBalancer(const ZoneConfig& cfg, const LockCostModel& cost)
    : cfg_(cfg), cost_(cost) {
  cfg_.validate();
}

double ZoneBalancer::gate_input(const LoadSnapshot& loads) const {
  return cfg_.balance_cpus_avg_enable ? loads.average() : loads.max();
}

bool ZoneBalancer::gate(const LoadSnapshot& loads) const {
  return gate_input(loads) > cfg_.policy.threshold();
}

bool ZoneBalancer::eligible(const Task& t) const {
  if (t.pinned()) return false;
  if (!cfg_.policy.is_warm()) return true;
  return effective_usage(t) > static_cast<int>(cfg_.policy.spot);
}

std::optional<TaskId> ZoneBalancer::select_victim(const Scheduler& sched, CpuId src) const {
  std::optional<TaskId> best;
  double best_usage = 0.0;
  for (TaskId id : sched.runqueue(src).queue) {
    const Task& t = sched.task(id);
    if (!eligible(t)) continue;
    const double u = effective_usage(t);
    if (!best || u > best_usage || (u == best_usage && id < *best)) {
      best = id;
      best_usage = u;
    }
  }
  return best;
}

void ZoneBalancer::update_weights(Scheduler& sched, SimTime now) const {
  if (!cfg_.policy.is_warm()) return;
  const int spot = static_cast<int>(cfg_.policy.spot);
  for (TaskId id : sched.live_tasks()) {
    Task& t = sched.mutable_task(id);
    update_weight(t.weight, t.usage_pct, spot, now, cfg_);
  }
}

BalanceOutcome ZoneBalancer::balance_busiest(Scheduler& sched, const LoadSnapshot& loads,
                                             CpuId src, SimTime now) {
  BalanceOutcome out;
  const auto dst = loads.least_loaded(src);
  if (!dst || loads.cpu_util[*dst] >= loads.cpu_util[src]) return out;
  const auto victim = select_victim(sched, src);
  if (!victim) return out;
  if (migrate_task(sched, cost_, *victim, *dst, now, Trigger::kTickBusiestMember)) {
    out.migrated = 1;
    out.checked_only = false;
  }
  return out;
}

TriggerResult ZoneBalancer::on_trigger(const TriggerEvent& ev, Scheduler& sched,
                                       const LoadSnapshot& loads, SimTime now) {
  sched.metrics().record_check();
  TriggerResult res;
  const bool open = gate(loads);

  if (const auto* created = std::get_if<trigger::TaskCreated>(&ev)) {
    const Task& t = sched.task(created->task);
    if (t.affinity) {
      res.cpu = *t.affinity;
    } else if (open) {
      res.cpu = loads.least_loaded().value_or(created->creator);
    } else {
      res.cpu = created->creator;
    }
  } else if (const auto* woke = std::get_if<trigger::IdleWakeup>(&ev)) {
    const Task& t = sched.task(woke->task);
    const CpuId last = t.cpu;
    res.cpu = last;
    if (open && eligible(t)) {
      const auto dst = loads.least_loaded();
      if (dst && *dst != last && loads.cpu_util[*dst] < loads.cpu_util[last] &&
          migrate_task(sched, cost_, t.id, *dst, now, Trigger::kIdleWakeup)) {
        res.cpu = *dst;
        res.outcome = {1, false};
      }
    }
  } else if (const auto* tick = std::get_if<trigger::TickBusiestMember>(&ev)) {
    if (open) res.outcome = balance_busiest(sched, loads, tick->cpu, now);
  }
  return res;
}

void ZoneBalancer::on_tick(Scheduler& sched, SimTime now) {
  update_weights(sched, now);
  const LoadSnapshot loads = LoadSnapshot::of(sched);
  if (const auto busiest = loads.busiest()) {
    on_trigger(trigger::TickBusiestMember{*busiest}, sched, loads, now);
  }
}

CpuId ZoneBalancer::place_new_task(Scheduler& sched, TaskId id, CpuId creator, SimTime now) {
  return *on_trigger(trigger::TaskCreated{id, creator}, sched, LoadSnapshot::of(sched), now).cpu;
}

CpuId ZoneBalancer::select_wakeup_cpu(Scheduler& sched, TaskId id, SimTime now) {
  const Task& t = sched.task(id);
  if (t.affinity) return *t.affinity;
  return *on_trigger(trigger::IdleWakeup{id}, sched, LoadSnapshot::of(sched), now).cpu;
}

}  // namespace zonebal
