#include "zonebal/scenario.h"

#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace zonebal {
namespace {

using json = nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Reads one JSON object, tracking which keys were consumed so leftovers can
// be reported as typos.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ScenarioError(path_, "expected an object");
  }

  const json* find(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  template <class Int>
  void integer(const std::string& key, Int& out, int64_t min = std::numeric_limits<int64_t>::min()) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number_integer()) throw ScenarioError(join(path_, key), "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v->is_number_unsigned()) {
        out = v->get<Int>();
        return;
      }
      if (v->get<int64_t>() < 0) throw ScenarioError(join(path_, key), "must be >= 0");
      out = static_cast<Int>(v->get<int64_t>());
    } else {
      const auto x = v->get<int64_t>();
      if (x < min) throw ScenarioError(join(path_, key), "must be >= " + std::to_string(min));
      if (x > static_cast<int64_t>(std::numeric_limits<Int>::max())) {
        throw ScenarioError(join(path_, key), "out of range");
      }
      out = static_cast<Int>(x);
    }
  }

  void number(const std::string& key, double& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number()) throw ScenarioError(join(path_, key), "expected a number");
    out = v->get<double>();
    if (out < 0) throw ScenarioError(join(path_, key), "must be >= 0");
  }

  void flag(const std::string& key, bool& out) {
    const json* v = find(key);
    if (!v) return;
    if (v->is_boolean()) {
      out = v->get<bool>();
    } else if (v->is_number_integer() && (v->get<int64_t>() == 0 || v->get<int64_t>() == 1)) {
      out = v->get<int64_t>() == 1;
    } else {
      throw ScenarioError(join(path_, key), "expected 0, 1, true or false");
    }
  }

  void distribution(const std::string& key, Distribution& out) {
    const json* v = find(key);
    if (!v) return;
    const std::string where = join(path_, key);
    if (v->is_number_integer()) {
      out = Distribution::constant(v->get<int64_t>());
    } else if (v->is_object()) {
      ObjectReader r(*v, where);
      if (const json* u = r.find("uniform")) {
        if (!u->is_array() || u->size() != 2 || !(*u)[0].is_number_integer() ||
            !(*u)[1].is_number_integer()) {
          throw ScenarioError(join(where, "uniform"), "expected [min, max] integers");
        }
        out = Distribution::uniform((*u)[0].get<int64_t>(), (*u)[1].get<int64_t>());
      } else if (const json* c = r.find("constant")) {
        if (!c->is_number_integer()) throw ScenarioError(join(where, "constant"), "expected an integer");
        out = Distribution::constant(c->get<int64_t>());
      } else {
        throw ScenarioError(where, "expected {\"uniform\": [min, max]} or {\"constant\": v}");
      }
      r.finish();
    } else {
      throw ScenarioError(where, "expected an integer or a distribution object");
    }
    if (out.lo < 0 || out.hi < out.lo) throw ScenarioError(where, "bounds must satisfy 0 <= min <= max");
  }

  std::optional<ObjectReader> child(const std::string& key) {
    const json* v = find(key);
    if (!v || v->is_null()) return std::nullopt;
    return ObjectReader(*v, join(path_, key));
  }

  const std::string& path() const { return path_; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!used_.contains(it.key())) throw ScenarioError(join(path_, it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

json dist_json(const Distribution& d) {
  if (d.is_constant()) return d.lo;
  return json{{"uniform", {d.lo, d.hi}}};
}

json to_json(const Scenario& s) {
  json j;
  j["n_cpus"] = s.n_cpus;
  j["duration_us"] = s.duration_us;
  j["seed"] = s.seed;
  j["tick_us"] = s.tick_us;
  j["util_window_us"] = s.util_window_us;
  j["cache_penalty_us"] = s.cache_penalty_us;
  j["balancer"] = s.balancer == BalancerKind::kBaseline ? "baseline" : "zone";
  j["baseline"] = {
      {"balance_interval_idle_us", s.baseline.balance_interval_idle_us},
      {"balance_interval_busy_us", s.baseline.balance_interval_busy_us},
      {"imbalance_pct", s.baseline.imbalance_pct},
      {"lock_base_us", s.lock.lock_base_us},
      {"per_task_us", s.lock.per_task_us},
      {"max_move_per_balance", s.baseline.max_move_per_balance},
  };
  j["zone"] = {
      {"policy", s.zone.policy.name()},
      {"balance_cpus_avg_enable", s.zone.balance_cpus_avg_enable ? 1 : 0},
      {"balance_weight_prize_time_us", s.zone.balance_weight_prize_time_us},
      {"balance_weight_punish_time_us", s.zone.balance_weight_punish_time_us},
      {"weight_step", s.zone.weight_step},
  };
  json probe = nullptr;
  if (s.probe) probe = {{"period_us", s.probe->period_us}, {"pinned_cpu", s.probe->pinned_cpu}};
  const StressSpec& st = s.stress;
  j["workload"] = {
      {"probe", probe},
      {"stress",
       {
           {"n_cpu_hogs", st.n_cpu_hogs},
           {"n_io_waiters", st.n_io_waiters},
           {"hog_burst_us", dist_json(st.hog_burst_us)},
           {"hog_block_us", dist_json(st.hog_block_us)},
           {"waiter_burst_us", dist_json(st.waiter_burst_us)},
           {"waiter_block_us", dist_json(st.waiter_block_us)},
           {"spawn_rate", st.spawn_rate},
           {"spawn_cpu", st.spawn_cpu},
           {"spawn_burst_us", dist_json(st.spawn_burst_us)},
           {"spawn_block_us", dist_json(st.spawn_block_us)},
           {"lifetime", dist_json(st.lifetime_us)},
       }},
  };
  return j;
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_script(const Distribution& burst, const Distribution& block, const std::string& where) {
  if (burst.lo == 0 && block.lo == 0) {
    throw ScenarioError(where, "burst and block distributions may both draw zero");
  }
}

}  // namespace

void Scenario::validate() const {
  if (n_cpus < 1) throw ScenarioError("n_cpus", "must be >= 1");
  if (tick_us < 1) throw ScenarioError("tick_us", "must be >= 1");
  if (duration_us < tick_us) throw ScenarioError("duration_us", "must be >= tick_us");
  if (util_window_us < tick_us) throw ScenarioError("util_window_us", "must be >= tick_us");
  if (cache_penalty_us < 0) throw ScenarioError("cache_penalty_us", "must be >= 0");
  try {
    baseline.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("baseline", e.what());
  }
  if (lock.lock_base_us < 0) throw ScenarioError("baseline.lock_base_us", "must be >= 0");
  if (lock.per_task_us < 0) throw ScenarioError("baseline.per_task_us", "must be >= 0");
  try {
    zone.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError("zone", e.what());
  }
  if (probe) {
    if (probe->period_us < 1) throw ScenarioError("workload.probe.period_us", "must be >= 1");
    if (probe->pinned_cpu < 0 || probe->pinned_cpu >= n_cpus) {
      throw ScenarioError("workload.probe.pinned_cpu", "names a CPU that does not exist");
    }
  }
  if (stress.n_cpu_hogs < 0) throw ScenarioError("workload.stress.n_cpu_hogs", "must be >= 0");
  if (stress.n_io_waiters < 0) throw ScenarioError("workload.stress.n_io_waiters", "must be >= 0");
  if (stress.spawn_cpu < 0 || stress.spawn_cpu >= n_cpus) {
    throw ScenarioError("workload.stress.spawn_cpu", "names a CPU that does not exist");
  }
  check_script(stress.hog_burst_us, stress.hog_block_us, "workload.stress.hog_burst_us");
  check_script(stress.waiter_burst_us, stress.waiter_block_us, "workload.stress.waiter_burst_us");
  check_script(stress.spawn_burst_us, stress.spawn_block_us, "workload.stress.spawn_burst_us");
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError("", std::string("malformed JSON: ") + e.what());
  }

  Scenario s;
  ObjectReader root(doc, "");
  root.integer("n_cpus", s.n_cpus, 1);
  root.integer("duration_us", s.duration_us, 1);
  root.integer("seed", s.seed);
  root.integer("tick_us", s.tick_us, 1);
  root.integer("util_window_us", s.util_window_us, 1);
  root.integer("cache_penalty_us", s.cache_penalty_us, 0);
  if (const json* b = root.find("balancer")) {
    if (*b == "baseline") {
      s.balancer = BalancerKind::kBaseline;
    } else if (*b == "zone") {
      s.balancer = BalancerKind::kZone;
    } else {
      throw ScenarioError("balancer", "expected \"baseline\" or \"zone\"");
    }
  }

  if (auto b = root.child("baseline")) {
    b->integer("balance_interval_idle_us", s.baseline.balance_interval_idle_us, 1);
    b->integer("balance_interval_busy_us", s.baseline.balance_interval_busy_us, 1);
    b->integer("imbalance_pct", s.baseline.imbalance_pct, 1);
    b->integer("lock_base_us", s.lock.lock_base_us, 0);
    b->integer("per_task_us", s.lock.per_task_us, 0);
    b->integer("max_move_per_balance", s.baseline.max_move_per_balance, 1);
    b->finish();
  }

  if (auto z = root.child("zone")) {
    if (const json* p = z->find("policy")) {
      const auto parsed = p->is_string() ? ZonePolicy::parse(p->get<std::string>()) : std::nullopt;
      if (!parsed) {
        throw ScenarioError("zone.policy", "expected cold, warm_low, warm_mid, warm_high or hot");
      }
      s.zone.policy = *parsed;
    }
    z->flag("balance_cpus_avg_enable", s.zone.balance_cpus_avg_enable);
    z->integer("balance_weight_prize_time_us", s.zone.balance_weight_prize_time_us, 1);
    z->integer("balance_weight_punish_time_us", s.zone.balance_weight_punish_time_us, 1);
    z->integer("weight_step", s.zone.weight_step, 1);
    z->finish();
  }

  if (auto w = root.child("workload")) {
    if (auto p = w->child("probe")) {
      ProbeSpec probe;
      p->integer("period_us", probe.period_us, 1);
      p->integer("pinned_cpu", probe.pinned_cpu, 0);
      p->finish();
      s.probe = probe;
    }
    if (auto st = w->child("stress")) {
      StressSpec& x = s.stress;
      st->integer("n_cpu_hogs", x.n_cpu_hogs, 0);
      st->integer("n_io_waiters", x.n_io_waiters, 0);
      st->distribution("hog_burst_us", x.hog_burst_us);
      st->distribution("hog_block_us", x.hog_block_us);
      st->distribution("waiter_burst_us", x.waiter_burst_us);
      st->distribution("waiter_block_us", x.waiter_block_us);
      st->number("spawn_rate", x.spawn_rate);
      st->integer("spawn_cpu", x.spawn_cpu, 0);
      st->distribution("spawn_burst_us", x.spawn_burst_us);
      st->distribution("spawn_block_us", x.spawn_block_us);
      st->distribution("lifetime", x.lifetime_us);
      st->finish();
    }
    w->finish();
  }
  root.finish();
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string scenario_json(const Scenario& s) { return to_json(s).dump(); }

std::string scenario_hash(const Scenario& s) {
  json j = to_json(s);
  j.erase("balancer");
  j.erase("seed");
  j["zone"].erase("policy");
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return out;
}

void apply_policy(Scenario& s, std::string_view policy) {
  if (policy == "baseline") {
    s.balancer = BalancerKind::kBaseline;
    return;
  }
  constexpr std::string_view kZonePrefix = "zone:";
  if (policy.starts_with(kZonePrefix)) {
    if (const auto p = ZonePolicy::parse(policy.substr(kZonePrefix.size()))) {
      s.balancer = BalancerKind::kZone;
      s.zone.policy = *p;
      return;
    }
  }
  throw ScenarioError("policy", "unknown policy '" + std::string(policy) +
                                    "' (expected baseline or zone:{cold,warm_low,warm_mid,warm_high,hot})");
}

std::string policy_label(const Scenario& s) {
  return s.balancer == BalancerKind::kBaseline ? "baseline" : s.zone.policy.name();
}

}  // namespace zonebal
