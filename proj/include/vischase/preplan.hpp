#pragma once

#include <string>
#include <vector>

#include "vischase/fields.hpp"
#include "vischase/world.hpp"

namespace vischase {

/// Target positions sampled at t0 + n * dt, n = 0..N.
struct TargetForecast {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Vec3> samples;

  int N() const { return static_cast<int>(samples.size()) - 1; }
  double time(int n) const { return t0 + n * dt; }
};

TargetForecast forecast_window(const TargetPath& path, double t, double H, int N);

struct CandidateSet {
  int layer = 0;
  std::vector<Vec3> points;
};

/// Elevation (rad) of the bearing from the target to the viewpoint.
double elevation(const Vec3& viewpoint, const Vec3& target);

/// Lattice viewpoints around the target between the tracking-distance
/// bounds, filtered by elevation, line of sight and clearance. Throws
/// Infeasible when nothing survives.
CandidateSet generate_candidates(const DistanceField& field, const Vec3& target, int layer,
                                 const PlannerConfig& cfg);

/// Decomposed transition cost between consecutive waypoints.
struct EdgeCost {
  double interval = 0.0;    // squared waypoint spacing
  double visibility = 0.0;  // transitional visibility cost c_v (may be +inf)
  double tracking = 0.0;    // squared tracking-distance residual
  double integral_prev = 0.0;
  double integral_next = 0.0;
  double total = 0.0;       // interval + w_v * visibility + w_d * tracking
};

EdgeCost compose_edge_cost(double interval, double visibility, double tracking, double w_v, double w_d);

EdgeCost edge_cost(const DistanceField& field, const Vec3& x_prev, const Vec3& x_next,
                   const Vec3& x_p_prev, const Vec3& x_p_next, const PlannerConfig& cfg);

struct GraphEdge {
  int from = 0;  // index in layer n-1
  int to = 0;    // index in layer n
  EdgeCost cost;
};

/// Layers 0..N of viewpoints; layer 0 holds the chaser position. The
/// virtual goal layer N+1 is implicit: every layer-N vertex reaches it with
/// `dummy_weight`.
struct LayeredGraph {
  std::vector<std::vector<Vec3>> layers;
  std::vector<std::vector<GraphEdge>> edges;  // edges[n] joins layer n-1 to layer n; edges[0] unused
  std::vector<double> times;
  double dummy_weight = 1.0;

  int N() const { return static_cast<int>(layers.size()) - 1; }
  std::size_t edge_count() const;
};

LayeredGraph build_graph(const DistanceField& field, const Vec3& chaser_pos, const TargetForecast& forecast,
                         const PlannerConfig& cfg);

/// Candidate sets for layers 1..N of the forecast.
std::vector<CandidateSet> generate_layers(const DistanceField& field, const TargetForecast& forecast,
                                          const PlannerConfig& cfg);

/// Edge construction over precomputed candidate layers.
LayeredGraph connect_layers(const DistanceField& field, const Vec3& chaser_pos, const TargetForecast& forecast,
                            const std::vector<CandidateSet>& candidates, const PlannerConfig& cfg);

struct WaypointPlan {
  std::vector<double> times;
  std::vector<Vec3> waypoints;
  std::vector<int> candidate_index;  // per layer; 0 for the source
  std::vector<EdgeCost> edges;       // edges[n-1] joins waypoint n-1 to n
  double total_cost = 0.0;           // excludes the virtual goal edge

  // Diagnostics for reporting.
  std::vector<int> candidate_counts;
  std::size_t edge_count = 0;

  int N() const { return static_cast<int>(waypoints.size()) - 1; }
};

/// Dijkstra from the source to the virtual goal; on equal tentative cost the
/// predecessor with the smaller candidate index wins.
WaypointPlan shortest_path(const LayeredGraph& graph);

/// Forward dynamic program over the layers; same tie rule, same result.
WaypointPlan shortest_path_dp(const LayeredGraph& graph);

WaypointPlan preplan(const DistanceField& field, const ChaserState& chaser, const TargetForecast& forecast,
                     const PlannerConfig& cfg);

/// Re-checks every waypoint-plan constraint against the field; returns a
/// description of each violation (empty when the plan is admissible).
std::vector<std::string> plan_violations(const DistanceField& field, const WaypointPlan& plan,
                                         const Vec3& chaser_pos, const TargetForecast& forecast,
                                         const PlannerConfig& cfg);

double effective_step(const DistanceField& field, const PlannerConfig& cfg);

}  // namespace vischase
