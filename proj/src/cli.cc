#include "zonebal/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "zonebal/metrics.h"
#include "zonebal/scenario.h"
#include "zonebal/simulator.h"

namespace zonebal::cli {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string scenario_path;
  std::optional<uint64_t> seed;
  std::optional<int64_t> duration_us;
  std::string out_dir;
};

Scenario load_with_overrides(const CommonOptions& o, const std::optional<std::string>& policy) {
  Scenario s = load_scenario(o.scenario_path);
  if (policy) apply_policy(s, *policy);
  if (o.seed) s.seed = *o.seed;
  if (o.duration_us) s.duration_us = *o.duration_us;
  s.validate();
  return s;
}

// Writes via a sibling temp file so a reader never sees a partial file.
void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_run(const fs::path& dir, const RunArtifacts& run) {
  std::ostringstream csv, plot;
  write_samples_csv(csv, run.samples);
  write_plot_data(plot, run.samples);
  write_file(dir / "samples.csv", csv.str());
  write_file(dir / "latency.dat", plot.str());
  write_file(dir / "summary.json", summary_json(run.report));
}

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << *v;
  return os.str();
}

std::string slug(std::string policy) {
  for (char& c : policy) {
    if (c == ':') c = '_';
  }
  return policy;
}

void print_report(std::ostream& out, const RunReport& r) {
  out << std::left << std::setw(10) << r.policy << " samples=" << r.latency.count
      << " mean_us=" << fmt_opt(r.latency.mean_us)
      << " max_us=" << (r.latency.max_us ? std::to_string(*r.latency.max_us) : "-")
      << " migrations=" << r.migrations << " checks=" << r.direct_checks
      << " lock_hold_us=" << r.lock_hold_total_us << " mean_util=" << fmt_opt(r.mean_utilization)
      << '\n';
}

int do_run(const CommonOptions& o, const std::optional<std::string>& policy, std::ostream& out) {
  const Scenario s = load_with_overrides(o, policy);
  const RunArtifacts run = run_scenario(s);
  write_run(o.out_dir, run);
  print_report(out, run.report);
  return kExitOk;
}

int do_compare(const CommonOptions& o, const std::vector<std::string>& policies, std::ostream& out) {
  if (policies.size() < 2) throw ScenarioError("policies", "compare needs at least two policies");
  std::vector<RunReport> reports;
  for (const auto& p : policies) {
    const Scenario s = load_with_overrides(o, p);
    const RunArtifacts run = run_scenario(s);
    write_run(fs::path(o.out_dir) / slug(p), run);
    print_report(out, run.report);
    reports.push_back(run.report);
  }
  std::vector<Comparison> cmp;
  for (size_t i = 1; i < reports.size(); ++i) {
    cmp.push_back(compare(reports.front(), reports[i]));
    const Comparison& c = cmp.back();
    out << c.policy_a << " / " << c.policy_b << ": mean latency x" << fmt_opt(c.mean_latency_ratio)
        << ", migrations x" << fmt_opt(c.migration_ratio) << ", lock hold x"
        << fmt_opt(c.lock_hold_ratio) << '\n';
  }
  write_file(fs::path(o.out_dir) / "compare.json", comparison_json(reports, cmp));
  return kExitOk;
}

int do_sweep(const CommonOptions& o, const std::string& axis, const std::vector<int64_t>& values,
             const std::optional<std::string>& policy, std::ostream& out) {
  if (axis != "spot" && axis != "cache_penalty_us" && axis != "n_cpu_hogs") {
    throw ScenarioError("axis", "expected spot, cache_penalty_us or n_cpu_hogs");
  }
  if (values.empty()) throw ScenarioError("values", "sweep needs at least one value");

  std::ostringstream table;
  table << "value,policy,samples,mean_us,p99_us,migrations,direct_checks,lock_hold_total_us\n";
  for (int64_t v : values) {
    Scenario s = load_with_overrides(o, policy);
    if (axis == "spot") {
      const char* name = v == 30 ? "zone:warm_low" : v == 50 ? "zone:warm_mid" : v == 80 ? "zone:warm_high" : nullptr;
      if (!name) throw ScenarioError("values", "spot must be 30, 50 or 80");
      apply_policy(s, name);
    } else if (axis == "cache_penalty_us") {
      s.cache_penalty_us = v;
    } else {
      if (v > std::numeric_limits<int>::max()) throw ScenarioError("values", "n_cpu_hogs out of range");
      s.stress.n_cpu_hogs = static_cast<int>(v);
    }
    s.validate();
    const RunArtifacts run = run_scenario(s);
    write_run(fs::path(o.out_dir) / (axis + "_" + std::to_string(v)), run);
    const RunReport& r = run.report;
    table << v << ',' << r.policy << ',' << r.latency.count << ','
          << (r.latency.mean_us ? fmt_opt(r.latency.mean_us) : "") << ','
          << (r.latency.p99_us ? std::to_string(*r.latency.p99_us) : "") << ',' << r.migrations
          << ',' << r.direct_checks << ',' << r.lock_hold_total_us << '\n';
  }
  write_file(fs::path(o.out_dir) / "sweep.csv", table.str());
  out << table.str();
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("scenario", o.scenario_path, "Scenario JSON file")->required();
  cmd->add_option("--seed", o.seed, "Override the scenario seed");
  cmd->add_option("--duration-us", o.duration_us, "Override the simulated duration");
  cmd->add_option("-o,--out", o.out_dir, "Output directory");
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multicore load-balancing simulator"};
  app.require_subcommand(1);

  CommonOptions opts;
  if (const char* env = std::getenv("ZONEBAL_OUT"); env && *env) {
    opts.out_dir = env;
  } else {
    opts.out_dir = "out";
  }
  std::optional<std::string> policy;
  std::vector<std::string> policies;
  std::string axis;
  std::vector<int64_t> values;

  CLI::App* run = app.add_subcommand("run", "Run one simulation");
  add_common(run, opts);
  run->add_option("--policy", policy, "baseline | zone:{cold,warm_low,warm_mid,warm_high,hot}");

  CLI::App* cmp = app.add_subcommand("compare", "Run several policies on one scenario and seed");
  add_common(cmp, opts);
  cmp->add_option("policies", policies, "Policies; ratios are taken against the first")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "Run one simulation per value of a knob");
  add_common(sweep, opts);
  sweep->add_option("--axis", axis, "spot | cache_penalty_us | n_cpu_hogs")->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',');
  sweep->add_option("--policy", policy, "Policy for non-spot axes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (*run) return do_run(opts, policy, out);
    if (*cmp) return do_compare(opts, policies, out);
    return do_sweep(opts, axis, values, policy, out);
  } catch (const ScenarioError& e) {
    err << "error: invalid scenario: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const ScenarioMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const SimulationFailure& e) {
    err << "internal error: " << e.what() << "\nlast events:\n";
    for (const auto& line : e.trace()) err << "  " << line << '\n';
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace zonebal::cli
