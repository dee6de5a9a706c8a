#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "test_util.h"
#include "zonebal/cli.h"

namespace zonebal {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result zonebal(std::vector<std::string> args) {
  args.insert(args.begin(), "zonebal");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("zonebal_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_scenario(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

const std::string kDesk = testing::scenario_path("desk_scale.json");
const std::string kLight = testing::scenario_path("light_load.json");

TEST_F(CliTest, RunWritesArtifacts) {
  const auto r = zonebal({"run", kDesk, "--policy", "zone:warm_high", "--duration-us", "2000000", "-o", out("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir_ / "a" / "summary.json"));
  EXPECT_EQ(j["policy"], "warm_high");
  EXPECT_EQ(j["samples"], 2000);
  EXPECT_EQ(j["seed"], 20120711);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "samples.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "latency.dat"));
}

TEST_F(CliTest, InvalidScenarioExits2NamingTheKey) {
  const auto path = write_scenario("bad.json", R"({"n_cpus": 0})");
  const auto r = zonebal({"run", path, "-o", out("bad")});
  EXPECT_EQ(r.code, cli::kExitInvalid);
  EXPECT_NE(r.err.find("n_cpus"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "bad" / "summary.json"));
}

TEST_F(CliTest, BadArgumentsExit2) {
  EXPECT_EQ(zonebal({"run", kDesk, "--policy", "zone:tepid", "-o", out("x")}).code, cli::kExitInvalid);
  EXPECT_EQ(zonebal({"run", (dir_ / "missing.json").string()}).code, cli::kExitInvalid);
  EXPECT_EQ(zonebal({"frobnicate"}).code, cli::kExitInvalid);
  EXPECT_EQ(zonebal({}).code, cli::kExitInvalid);
}

TEST_F(CliTest, RepeatRunsAreByteIdentical) {
  for (const char* sub : {"one", "two"}) {
    ASSERT_EQ(zonebal({"run", kDesk, "--duration-us", "3000000", "-o", out(sub)}).code, 0);
  }
  for (const char* f : {"samples.csv", "summary.json", "latency.dat"}) {
    EXPECT_EQ(slurp(dir_ / "one" / f), slurp(dir_ / "two" / f)) << f;
  }
}

TEST_F(CliTest, SeedChangesTheRun) {
  ASSERT_EQ(zonebal({"run", kDesk, "--duration-us", "3000000", "-o", out("one")}).code, 0);
  ASSERT_EQ(zonebal({"run", kDesk, "--duration-us", "3000000", "--seed", "5", "-o", out("two")}).code, 0);
  EXPECT_NE(slurp(dir_ / "one" / "samples.csv"), slurp(dir_ / "two" / "samples.csv"));
}

TEST_F(CliTest, CompareSamePolicyGivesUnitRatios) {
  const auto r = zonebal({"compare", kDesk, "baseline", "baseline", "--duration-us", "2000000", "-o", out("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir_ / "c" / "compare.json"));
  ASSERT_EQ(j["comparisons"].size(), 1u);
  const json& c = j["comparisons"][0];
  EXPECT_EQ(c["mean_latency_ratio"], 1.0);
  EXPECT_EQ(c["migration_ratio"], 1.0);
  EXPECT_EQ(c["lock_hold_ratio"], 1.0);
}

TEST_F(CliTest, CompareThreePolicies) {
  const auto r = zonebal({"compare", kDesk, "baseline", "zone:warm_high", "zone:hot", "--duration-us", "2000000",
                          "-o", out("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir_ / "c" / "compare.json"));
  EXPECT_EQ(j["runs"].size(), 3u);
  EXPECT_EQ(j["comparisons"].size(), 2u);
  for (const auto& run : j["runs"]) EXPECT_EQ(run["scenario_hash"], j["runs"][0]["scenario_hash"]);
  EXPECT_TRUE(fs::exists(dir_ / "c" / "zone_warm_high" / "summary.json"));
}

TEST_F(CliTest, SpotSweepHasOneRowPerValue) {
  const auto r = zonebal({"sweep", kDesk, "--axis", "spot", "--values", "30,50,80", "--duration-us", "1000000",
                          "-o", out("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir_ / "s" / "sweep.csv"));
  std::vector<std::string> lines;
  for (std::string line; std::getline(csv, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1].rfind("30,warm_low,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("50,warm_mid,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("80,warm_high,", 0), 0u);
}

TEST_F(CliTest, SweepRejectsEmptyAndUnknown) {
  EXPECT_EQ(zonebal({"sweep", kDesk, "--axis", "spot", "-o", out("s")}).code, cli::kExitInvalid);
  EXPECT_EQ(zonebal({"sweep", kDesk, "--axis", "spot", "--values", "40", "-o", out("s")}).code, cli::kExitInvalid);
  EXPECT_EQ(zonebal({"sweep", kDesk, "--axis", "colour", "--values", "1", "-o", out("s")}).code,
            cli::kExitInvalid);
}

TEST_F(CliTest, CachePenaltySweepUnderColdLightLoad) {
  const auto r = zonebal({"sweep", kLight, "--axis", "cache_penalty_us", "--values", "0,200,1000", "--policy",
                          "zone:cold", "--duration-us", "2000000", "-o", out("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* v : {"0", "200", "1000"}) {
    const json j = json::parse(slurp(dir_ / "s" / (std::string("cache_penalty_us_") + v) / "summary.json"));
    EXPECT_EQ(j["migrations"], 0);
    EXPECT_EQ(j["cache_penalty_total_us"], 0);
  }
}

}  // namespace
}  // namespace zonebal
