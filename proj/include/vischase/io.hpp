#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vischase/mission.hpp"

namespace vischase {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

nlohmann::json vec_to_json(const Vec3& v);
nlohmann::json edge_cost_to_json(const EdgeCost& e);
nlohmann::json plan_to_json(const WaypointPlan& plan);
nlohmann::json corridors_to_json(const CorridorSequence& corridors);
nlohmann::json trajectory_to_json(const PiecewisePolynomial& traj);
nlohmann::json replan_to_json(const ReplanRecord& rec);
nlohmann::json metrics_to_json(const MissionMetrics& m);
nlohmann::json timings_to_json(const StageTimings& t);
nlohmann::json timing_summary_to_json(const TimingSummary& s);
nlohmann::json comparison_to_json(const std::vector<ComparisonRow>& rows);

/// Header line of the mission log CSV.
const std::string& log_csv_header();
std::string log_to_csv(const std::vector<LogSample>& samples);
/// Inverse of log_to_csv; throws InvalidInput on malformed rows.
std::vector<LogSample> parse_log_csv(const std::string& text);

/// Position, velocity, acceleration, yaw toward the target and speed,
/// sampled at `rate` Hz over the trajectory domain, endpoint included.
std::string trajectory_to_csv(const PiecewisePolynomial& traj, const TargetPath& target, double rate);

/// Writes text (or pretty JSON) to a file; throws Io on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
std::string read_text(const std::filesystem::path& path);

}  // namespace vischase
