#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "cubix/errors.hpp"
#include "cubix/runner.hpp"
#include "oracles.hpp"

namespace cubix {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(CUBIX_TEST_TMP) / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  return out;
}

TEST(Telemetry, ColumnLayout) {
  const auto cols = telemetry_columns(3);
  ASSERT_GE(cols.size(), 6u);
  EXPECT_EQ(cols[0], "format_version");
  EXPECT_EQ(cols[1], "tick");
  EXPECT_EQ(cols[2], "t");
  EXPECT_EQ(cols[3], "qx");
  EXPECT_EQ(cols[8], "qrz");
  const auto f0 = std::find(cols.begin(), cols.end(), "f0");
  ASSERT_NE(f0, cols.end());
  EXPECT_EQ(*(f0 + 1), "f1");
  EXPECT_EQ(*(f0 + 2), "f2");
  EXPECT_EQ(cols.back(), "T2");
  EXPECT_EQ(std::set<std::string>(cols.begin(), cols.end()).size(), cols.size());
}

TEST(Run, WritesArtifactsAndIsReproducible) {
  const Scenario s = load_scenario(oracle::scenario_path("cube8"));
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  const RunSummary ra = run(s, a);
  RunOptions tight;
  tight.queue_capacity = 1;  // exercise backpressure
  const RunSummary rb = run(s, b, tight);
  EXPECT_TRUE(ra.completed);
  for (const char* f : {"telemetry.csv", "summary.json", "resolved.scenario"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  const std::string ta = slurp(a / "telemetry.csv");
  EXPECT_EQ(ta, slurp(b / "telemetry.csv"));
  EXPECT_EQ(ra.rms_position_error, rb.rms_position_error);

  const auto rows = lines(ta);
  ASSERT_EQ(rows.size(), ra.ticks + 1);
  const auto header = split(rows[0]);
  const auto expected = telemetry_columns(8);
  EXPECT_EQ(header, expected);
  double last_t = -1.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto cells = split(rows[k]);
    ASSERT_EQ(cells.size(), header.size());
    EXPECT_EQ(cells[0], "1");
    EXPECT_EQ(std::stoull(cells[1]), k - 1);
    const double t = std::stod(cells[2]);
    EXPECT_GT(t, last_t);
    last_t = t;
  }

  // The resolved scenario reproduces the run.
  const RunSummary rc = run(load_scenario(a / "resolved.scenario"), scratch("repro_c"));
  EXPECT_EQ(rc.rms_position_error, ra.rms_position_error);
}

TEST(Run, SeedChangesNoise) {
  const Scenario s = load_scenario(oracle::scenario_path("cube8"));
  RunOptions o;
  o.seed = 99;
  const RunSummary r1 = run(s, {});
  const RunSummary r2 = run(s, {}, o);
  EXPECT_EQ(r2.seed, 99u);
  EXPECT_NE(r1.rms_position_error, r2.rms_position_error);
}

TEST(Run, FaultFlushesPartialTelemetry) {
  Scenario s = load_scenario(oracle::scenario_path("cube8"));
  s.simulation.limits.max_linear_speed = 0.02;  // the lift peaks at 0.11 m/s
  const fs::path dir = scratch("fault");
  EXPECT_THROW(run(s, dir), NumericalBlowup);
  const auto rows = lines(slurp(dir / "telemetry.csv"));
  EXPECT_GT(rows.size(), 10u);
  EXPECT_LT(rows.size(), 1600u);
  const std::string summary = slurp(dir / "summary.json");
  EXPECT_NE(summary.find("\"completed\": false"), std::string::npos);
  EXPECT_NE(summary.find("body speed out of bounds"), std::string::npos);
}

TEST(Run, OverridesAreValidated) {
  const Scenario s = load_scenario(oracle::scenario_path("cube8"));
  RunOptions o;
  o.dt = 0.05;
  EXPECT_THROW(run(s, {}, o), ValidationError);
  o.dt = 0.003;  // not a divisor of the 5 ms control period
  EXPECT_THROW(with_overrides(s, o), ValidationError);
  o.dt = 0.0005;
  EXPECT_EQ(with_overrides(s, o).steps_per_tick(), 10);
}

TEST(Deploy, AnchorTracesPerTrial) {
  const Scenario s = load_scenario(oracle::scenario_path("anchors2"));
  std::vector<AnchorTrace> traces;
  const auto wraps = deploy_anchors(s, 5, &traces);
  ASSERT_EQ(wraps.size(), 2u);
  EXPECT_EQ(traces.size(), 40u);
  for (const auto& w : wraps) {
    EXPECT_EQ(w.trials, 20);
    EXPECT_EQ(w.wrapped, 20);
  }
  const fs::path dir = scratch("anchors");
  fs::create_directories(dir);
  write_anchor_csv(dir / "anchors.csv", traces);
  const auto rows = lines(slurp(dir / "anchors.csv"));
  EXPECT_EQ(rows[0], "format_version,pillar,trial,t,x,y,z,ex,ey,ez,tag_visible,waypoint");
  std::size_t samples = 0;
  for (const auto& t : traces) samples += t.samples.size();
  EXPECT_EQ(rows.size(), samples + 1);
  // Same seed, same flights.
  std::vector<AnchorTrace> again;
  deploy_anchors(s, 5, &again);
  EXPECT_EQ(again.back().samples.back().position, traces.back().samples.back().position);
}

TEST(Summary, JsonFields) {
  RunSummary r;
  r.scenario = "x";
  r.max_tensions = VecX::Zero(2);
  const std::string j = summary_json(r);
  for (const char* key : {"rms_position_error", "max_tensions", "saturation_events",
                          "terminal_position_error", "segments", "wraps"}) {
    EXPECT_NE(j.find(key), std::string::npos) << key;
  }
}

}  // namespace
}  // namespace cubix
