#pragma once

#include <vector>

#include "vischase/fields.hpp"
#include "vischase/preplan.hpp"

namespace vischase {

/// Piecewise-linear interpolation of the waypoint plan at time tau.
Vec3 gamma(const WaypointPlan& plan, double tau);

struct CorridorBox {
  double tau = 0.0;
  int segment = 0;  // 1-based segment index n: t_{n-1} < tau < t_n
  Vec3 center = Vec3::Zero();
  Vec3 half_extent = Vec3::Zero();

  Vec3 lower() const { return center - half_extent; }
  Vec3 upper() const { return center + half_extent; }
};

struct CorridorLimits {
  double min_half_extent = 0.0;  // floor; phi below sqrt(3) times this collapses the corridor
  double max_half_extent = 0.0;  // cap

  /// Floor min(resolution / 2, corridor_shrink * r_safe / sqrt(3)); cap d_max / 2.
  static CorridorLimits defaults(const DistanceField& field, const PlannerConfig& cfg);
};

/// Axis-aligned box centered on gamma(tau) inscribed in the clearance ball:
/// each half extent is shrink * phi / sqrt(3), clamped to the limits.
CorridorBox corridor_at(const DistanceField& field, const WaypointPlan& plan, double tau, double shrink,
                        const CorridorLimits& limits);

struct CorridorSequence {
  std::vector<CorridorBox> entries;
  double shrink = 1.0;
};

/// M equispaced interior times per segment, knots excluded.
CorridorSequence build_corridors(const DistanceField& field, const WaypointPlan& plan, int M, double shrink,
                                 const CorridorLimits& limits);

}  // namespace vischase
