#ifndef ZONEBAL_SCENARIO_H_
#define ZONEBAL_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "zonebal/baseline_balancer.h"
#include "zonebal/migration.h"
#include "zonebal/workload.h"
#include "zonebal/zone_balancer.h"

namespace zonebal {

enum class BalancerKind { kBaseline, kZone };

struct Scenario {
  int n_cpus = 4;
  int64_t duration_us = 60'000'000;
  uint64_t seed = 1;
  int64_t tick_us = 1000;
  int64_t util_window_us = 100'000;
  int64_t cache_penalty_us = 200;

  BalancerKind balancer = BalancerKind::kBaseline;
  DomainConfig baseline;
  LockCostModel lock;
  ZoneConfig zone;

  std::optional<ProbeSpec> probe;
  StressSpec stress;

  // Throws ScenarioError naming the offending key.
  void validate() const;
};

// Invalid scenario input. `key` is the dotted path of the offending key, or
// empty for whole-document problems (syntax errors carry a byte offset in
// the message).
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// JSON scenario. Every key is optional and defaults as above; unknown keys
// are rejected.
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::string& path);

// Canonical JSON of every resolved knob.
std::string scenario_json(const Scenario& s);

// Hash over the canonical scenario with the balancer choice and the seed left
// out, so runs that differ only in policy share it.
std::string scenario_hash(const Scenario& s);

// "baseline" | "zone:cold" | "zone:warm_low" | "zone:warm_mid" |
// "zone:warm_high" | "zone:hot". Throws ScenarioError("policy", ...).
void apply_policy(Scenario& s, std::string_view policy);

// "baseline" or the zone policy name, as exported in summaries.
std::string policy_label(const Scenario& s);

}  // namespace zonebal

#endif  // ZONEBAL_SCENARIO_H_
