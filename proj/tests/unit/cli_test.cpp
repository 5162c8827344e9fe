#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;

fs::path tmp(const std::string& name) {
  const fs::path p = fs::path(CUBIX_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

int cubix(const std::string& args) {
  const std::string cmd = std::string(CUBIX_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scenario(const char* name) { return cubix::oracle::scenario_path(name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Cli, ValidateBundled) {
  for (const char* name : {"cube8", "cube8_overreach", "outdoor4", "anchors2"}) {
    EXPECT_EQ(cubix("validate " + scenario(name)), 0) << name;
  }
}

TEST(Cli, ValidateWritesResolvedScenario) {
  const fs::path out = tmp("validate");
  EXPECT_EQ(cubix("--out " + out.string() + " validate " + scenario("cube8")), 0);
  EXPECT_TRUE(fs::exists(out / "resolved.scenario"));
  // Flags may also follow the subcommand.
  const fs::path out2 = tmp("validate2");
  EXPECT_EQ(cubix("validate " + scenario("cube8") + " --out " + out2.string()), 0);
  EXPECT_EQ(slurp(out / "resolved.scenario"), slurp(out2 / "resolved.scenario"));
}

TEST(Cli, InvalidScenarioExitsTwo) {
  const fs::path bad = tmp("bad") / "bad.scenario";
  fs::create_directories(bad.parent_path());
  std::ofstream(bad) << "format_version: 1\nname: bad\nbody: {side: 0.4 m}\n"
                        "wires:\n  - {id: a, exit: 0 0 0 m, anchor: 1 0 0 m}\n";
  EXPECT_EQ(cubix("validate " + bad.string()), 2);
  EXPECT_EQ(cubix("run " + bad.string()), 2);
  EXPECT_EQ(cubix("validate /nonexistent.scenario"), 2);
  EXPECT_EQ(cubix("--dt 0.5 validate " + scenario("cube8")), 2);
  EXPECT_EQ(cubix("frobnicate"), 2);
  EXPECT_EQ(cubix(""), 2);
}

TEST(Cli, RuntimeFaultExitsThree) {
  const fs::path dir = tmp("fault");
  fs::create_directories(dir);
  std::string text = slurp(scenario("cube8"));
  const auto at = text.find("  seed: 1\n");
  ASSERT_NE(at, std::string::npos);
  text.insert(at, "  max_linear_speed: 0.02 m/s\n");
  std::ofstream(dir / "fast.scenario") << text;
  EXPECT_EQ(cubix("--out " + (dir / "out").string() + " run " + (dir / "fast.scenario").string()), 3);
  EXPECT_TRUE(fs::exists(dir / "out" / "telemetry.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
}

TEST(Cli, RunAnalyzeAndPlan) {
  const fs::path out = tmp("run");
  EXPECT_EQ(cubix("--seed 4 --out " + out.string() + " run " + scenario("cube8")), 0);
  const std::string header = slurp(out / "telemetry.csv").substr(0, 26);
  EXPECT_EQ(header, "format_version,tick,t,qx,q");
  EXPECT_NE(slurp(out / "summary.json").find("\"seed\": 4"), std::string::npos);

  const fs::path an = tmp("analyze");
  EXPECT_EQ(cubix("--out " + an.string() + " analyze " + scenario("cube8") +
                  " --position \"0 0 10 cm\" --directions 100"),
            0);
  EXPECT_NE(slurp(an / "feasibility.json").find("\"fully_constrained\": true"), std::string::npos);
  EXPECT_TRUE(fs::exists(an / "feasibility.csv"));
  EXPECT_EQ(cubix("analyze " + scenario("cube8") + " --position \"0 0 10 kg\""), 2);

  const fs::path pl = tmp("plan");
  EXPECT_EQ(cubix("--out " + pl.string() + " plan-anchor " + scenario("anchors2")), 0);
  EXPECT_TRUE(fs::exists(pl / "anchors.csv"));
  EXPECT_EQ(cubix("plan-anchor " + scenario("cube8")), 2);
}

}  // namespace
