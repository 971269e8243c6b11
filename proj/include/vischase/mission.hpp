#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vischase/corridor.hpp"
#include "vischase/error.hpp"
#include "vischase/fields.hpp"
#include "vischase/preplan.hpp"
#include "vischase/trajopt.hpp"
#include "vischase/world.hpp"

namespace vischase {

/// Wall-clock seconds spent per pipeline stage in one replanning session.
struct StageTimings {
  double forecast = 0.0;
  double candidates = 0.0;  // visibility-filtered viewpoint sets
  double graph = 0.0;       // edge construction and shortest path
  double corridor = 0.0;
  double qp = 0.0;

  double total() const { return forecast + candidates + graph + corridor + qp; }
};

struct ReplanRecord {
  int index = 0;
  double trigger_time = 0.0;
  double execute_until = 0.0;
  ChaserState state;
  TargetForecast forecast;
  WaypointPlan plan;
  CorridorSequence corridors;
  PiecewisePolynomial trajectory;
  bool relaxed_corridors = false;
  StageTimings timings;
};

struct LogSample {
  double t = 0.0;
  Vec3 chaser_position = Vec3::Zero();
  Vec3 chaser_velocity = Vec3::Zero();
  Vec3 target_position = Vec3::Zero();
  double yaw = 0.0;
  double psi = 0.0;         // visibility of the target from the chaser
  double phi_chaser = 0.0;
  double phi_target = 0.0;
  bool below_safe = false;  // phi_chaser < r_safe
  bool replan = false;      // first sample of a replanning window
};

struct MissionLog {
  std::vector<LogSample> samples;
  std::vector<ReplanRecord> replans;
  double edf_seconds = 0.0;

  std::vector<double> trigger_times() const;
};

struct MissionMetrics {
  double duration = 0.0;
  double travel_distance = 0.0;
  double average_speed = 0.0;
  double average_psi = 0.0;
  double occlusion_duration = 0.0;
  double min_phi_chaser = 0.0;
  double average_phi_target = 0.0;
  std::size_t samples = 0;
  std::size_t unsafe_samples = 0;  // phi_chaser < r_safe
};

/// Mean per-replan stage durations plus the one-off EDF time.
struct TimingSummary {
  double edf = 0.0;
  StageTimings mean;
  StageTimings max;
  std::size_t replans = 0;
};

/// Time-weighted (trapezoidal) statistics; an interval counts as occluded
/// when psi <= 0 at both of its samples.
MissionMetrics compute_metrics(const std::vector<LogSample>& samples);
inline MissionMetrics compute_metrics(const MissionLog& log) { return compute_metrics(log.samples); }

TimingSummary summarize_timings(const MissionLog& log);

struct MissionResult {
  MissionLog log;
  MissionMetrics metrics;
};

/// Stage failure inside the loop; carries the log recorded so far.
class MissionAborted : public Error {
 public:
  MissionAborted(const Error& cause, double trigger_time, MissionLog partial);
  double trigger_time() const { return trigger_time_; }
  const MissionLog& partial_log() const { return partial_; }
  ErrorKind cause_kind() const { return kind(); }

 private:
  double trigger_time_;
  MissionLog partial_;
};

/// Single replanning session: forecast, preplan, corridors, trajectory.
ReplanRecord replan_once(const DistanceField& field, const TargetPath& target, const ChaserState& state,
                         const PlannerConfig& cfg);

/// Receding-horizon chase with kinematic execution of each trajectory for
/// H - replan_slack seconds.
MissionResult run_mission(const Scenario& scenario);
MissionResult run_mission(const Scenario& scenario, const DistanceField& field, double edf_seconds = 0.0);

struct ComparisonRow {
  double w_v = 0.0;
  std::optional<MissionMetrics> metrics;
  std::string error;  // stage failure message when metrics is empty
  std::string error_stage;
};

/// One mission per visibility weight, everything else identical.
std::vector<ComparisonRow> compare_runs(const Scenario& scenario, const std::vector<double>& weights);

}  // namespace vischase
