#include "vischase/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vischase/error.hpp"

namespace vischase {

Vec3 gamma(const WaypointPlan& plan, double tau) {
  const int N = plan.N();
  if (N < 1) throw Error(ErrorKind::InvalidInput, "corridor", "plan has no segments");
  if (!(tau >= plan.times.front() && tau <= plan.times.back())) {
    std::ostringstream msg;
    msg << "time " << tau << " outside the plan window [" << plan.times.front() << ", " << plan.times.back() << "]";
    throw Error(ErrorKind::OutOfRange, "corridor", msg.str());
  }
  int n = 1;
  while (n < N && tau > plan.times[n]) ++n;
  const double t0 = plan.times[n - 1];
  const double t1 = plan.times[n];
  if (tau == t1) return plan.waypoints[n];
  if (tau == t0) return plan.waypoints[n - 1];
  const double dt = t1 - t0;
  return ((t1 - tau) / dt) * plan.waypoints[n - 1] + ((tau - t0) / dt) * plan.waypoints[n];
}

CorridorLimits CorridorLimits::defaults(const DistanceField& field, const PlannerConfig& cfg) {
  // Floor kept at or under shrink * r_safe / sqrt(3).
  const double floor = std::min(0.5 * field.resolution(), cfg.corridor_shrink * cfg.r_safe / std::sqrt(3.0));
  return {floor, 0.5 * cfg.d_max};
}

CorridorBox corridor_at(const DistanceField& field, const WaypointPlan& plan, double tau, double shrink,
                        const CorridorLimits& limits) {
  static const double kSqrt3 = std::sqrt(3.0);
  CorridorBox box;
  box.tau = tau;
  box.center = gamma(plan, tau);
  const double clearance = field.phi(box.center);
  if (!(clearance > limits.min_half_extent * kSqrt3)) {
    std::ostringstream msg;
    msg << "corridor collapsed at tau=" << tau << " (phi=" << clearance << ")";
    throw Error(ErrorKind::Infeasible, "corridor", msg.str());
  }
  double half = shrink * clearance / kSqrt3;
  half = std::max(half, limits.min_half_extent);
  half = std::min(half, limits.max_half_extent);
  box.half_extent = Vec3::Constant(half);
  return box;
}

CorridorSequence build_corridors(const DistanceField& field, const WaypointPlan& plan, int M, double shrink,
                                 const CorridorLimits& limits) {
  if (M < 1) throw Error(ErrorKind::InvalidInput, "corridor", "corridor count M must be positive");
  CorridorSequence seq;
  seq.shrink = shrink;
  for (int n = 1; n <= plan.N(); ++n) {
    const double t0 = plan.times[n - 1];
    const double dt = plan.times[n] - t0;
    for (int i = 1; i <= M; ++i) {
      const double tau = t0 + i * dt / (M + 1);
      try {
        CorridorBox box = corridor_at(field, plan, tau, shrink, limits);
        box.segment = n;
        seq.entries.push_back(box);
      } catch (const Error& e) {
        std::ostringstream msg;
        msg << "segment " << n << ": " << e.what();
        throw Error(e.kind(), "corridor", msg.str());
      }
    }
  }
  return seq;
}

}  // namespace vischase
