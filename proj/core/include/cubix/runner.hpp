#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cubix/feasibility.hpp"
#include "cubix/scenario.hpp"
#include "cubix/telemetry.hpp"

namespace cubix {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::size_t queue_capacity = 1024;
};

/// Tracking statistics over one trajectory segment.
struct SegmentStats {
  std::string label;
  double start = 0.0;
  double end = 0.0;
  double rms_position = 0.0;  ///< m
  double rms_rotation = 0.0;  ///< rad
  double max_position = 0.0;
  std::size_t ticks = 0;
  std::size_t saturated_ticks = 0;
  std::size_t max_saturated_wires = 0;
  double max_residual = 0.0;
};

struct WrapResult {
  std::string pillar;
  int trials = 0;
  int wrapped = 0;  ///< trials with winding number +1
  std::vector<int> winding;
  Vec3 anchor = Vec3::Zero();
  std::size_t waypoints = 0;
  double path_length = 0.0;
  double mean_duration = 0.0;
};

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  double dt = 0.0;
  std::uint64_t ticks = 0;
  double sim_time = 0.0;
  bool completed = false;
  std::string fault;
  std::uint64_t controller_faults = 0;

  double rms_position_error = 0.0;  ///< over the trajectory, m
  double rms_rotation_error = 0.0;  ///< rad
  double max_position_error = 0.0;
  Vec3 terminal_position_error = Vec3::Zero();  ///< reference minus actual
  double terminal_rotation_error = 0.0;

  VecX max_tensions;
  std::size_t saturation_events = 0;  ///< ticks with at least one saturated wire
  std::size_t max_saturated_wires = 0;
  double max_residual = 0.0;

  Vec3 displacement = Vec3::Zero();  ///< final minus initial position
  Vec3 excursion = Vec3::Zero();     ///< max minus min position per axis
  std::vector<SegmentStats> segments;
  std::vector<WrapResult> wraps;
  double wall_time = 0.0;  ///< s
};

/// Apply CLI overrides and revalidate.
Scenario with_overrides(Scenario scenario, const RunOptions& options);

/// Plan and fly every pillar's wrap `deployment.trials` times with noisy tag
/// measurements. Throws NoClearance or TrackingTimeout.
std::vector<WrapResult> deploy_anchors(const Scenario& scenario, std::uint64_t seed,
                                       std::vector<AnchorTrace>* traces = nullptr);

/// Anchor deployment (when pillars are declared) followed by the closed-loop
/// simulation. With a non-empty `out_dir` writes telemetry.csv, anchors.csv,
/// resolved.scenario and summary.json. Module faults propagate after the
/// telemetry so far and the summary have been written.
RunSummary run(const Scenario& scenario, const std::filesystem::path& out_dir,
               const RunOptions& options = {});

std::string summary_json(const RunSummary& summary);

struct AnalyzeOptions {
  std::optional<Pose> pose;  ///< defaults to the trajectory start
  std::optional<double> f_max;
  std::size_t directions = 1000;
};

/// Wrench feasibility at a pose, centered on the gravity-compensating wrench.
FeasibilityReport analyze(const Scenario& scenario, const AnalyzeOptions& options = {});

std::string report_json(const FeasibilityReport& report);

}  // namespace cubix
