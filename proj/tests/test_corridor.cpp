#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "plan_fixtures.hpp"
#include "vischase/corridor.hpp"
#include "vischase/error.hpp"

using namespace vischase;
using testutil::make_plan;

namespace {

// Unit voxels, one occupied voxel at the origin corner.
DistanceField corner_field() {
  VoxelGrid g(Vec3::Zero(), 1.0, {6, 6, 6});
  g.set_occupied({0, 0, 0}, true);
  return compute_edf(g);
}

WaypointPlan four_segments() {
  return make_plan({0, 1.25, 2.5, 3.75, 5.0},
                   {Vec3(1, 1, 1), Vec3(2, 1.5, 1), Vec3(3, 3, 1.5), Vec3(3, 4, 2), Vec3(4.5, 4, 2)});
}

}  // namespace

TEST_CASE("gamma passes through the waypoints and interpolates linearly") {
  const WaypointPlan p = four_segments();
  for (int n = 0; n <= 4; ++n) CHECK(gamma(p, p.times[n]) == p.waypoints[n]);
  for (int n = 1; n <= 4; ++n) {
    const double mid = 0.5 * (p.times[n - 1] + p.times[n]);
    CHECK((gamma(p, mid) - 0.5 * (p.waypoints[n - 1] + p.waypoints[n])).norm() < 1e-12);
  }
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double t = u(rng);
    int n = 1;
    while (t > p.times[n]) ++n;
    const double s = (t - p.times[n - 1]) / (p.times[n] - p.times[n - 1]);
    const Vec3 ref = p.waypoints[n - 1] + s * (p.waypoints[n] - p.waypoints[n - 1]);
    CHECK((gamma(p, t) - ref).norm() < 1e-12);
  }
  CHECK_THROWS_AS(gamma(p, 5.01), Error);
  CHECK_THROWS_AS(gamma(p, -0.01), Error);
}

TEST_CASE("corridor half extent is shrink * phi / sqrt(3)") {
  const DistanceField f = corner_field();
  const CorridorLimits wide{0.1, 5.0};
  const Vec3 diag = f.center({1, 1, 1});  // phi = sqrt(3)
  const WaypointPlan at_diag = make_plan({0, 1}, {diag, diag});
  const CorridorBox b = corridor_at(f, at_diag, 0.5, 1.0, wide);
  CHECK(b.half_extent.x() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(b.half_extent == Vec3::Constant(b.half_extent.x()));
  CHECK(b.center == diag);

  const Vec3 near(1.4, 0.5, 0.5);  // phi = 0.9 between the first two centers
  const WaypointPlan at_near = make_plan({0, 1}, {near, near});
  CHECK(corridor_at(f, at_near, 0.5, 1.0, wide).half_extent.x() == doctest::Approx(0.5196).epsilon(1e-4));
  CHECK(corridor_at(f, at_near, 0.5, 0.5, wide).half_extent.x() == doctest::Approx(0.2598).epsilon(1e-4));
}

TEST_CASE("corridor collapses where phi falls to sqrt(3) times the floor") {
  const DistanceField f = corner_field();
  const Vec3 x(0.8, 0.5, 0.5);  // phi = 0.3
  const WaypointPlan p = make_plan({0, 1}, {x, x});
  CHECK_NOTHROW(corridor_at(f, p, 0.5, 1.0, {0.17, 5.0}));
  try {
    corridor_at(f, p, 0.5, 1.0, {0.18, 5.0});
    FAIL("expected collapse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
    CHECK(std::string(e.what()).find("collapsed") != std::string::npos);
  }
}

TEST_CASE("open space clamps every box to the cap") {
  const DistanceField f = compute_edf(VoxelGrid(Vec3::Zero(), 0.4, {20, 20, 10}));
  const WaypointPlan p = four_segments();
  PlannerConfig cfg;
  const CorridorSequence seq = build_corridors(f, p, 2, 0.9, CorridorLimits::defaults(f, cfg));
  REQUIRE(seq.entries.size() == 8u);
  for (const auto& b : seq.entries) CHECK(b.half_extent == Vec3::Constant(cfg.d_max / 2));
}

TEST_CASE("corridor samples sit at interior equispaced times of each segment") {
  const DistanceField f = corner_field();
  const WaypointPlan p = four_segments();
  const CorridorSequence seq = build_corridors(f, p, 2, 0.9, {0.05, 1.0});
  REQUIRE(seq.entries.size() == 8u);
  CHECK(seq.shrink == 0.9);
  for (int n = 1; n <= 4; ++n)
    for (int i = 1; i <= 2; ++i) {
      const CorridorBox& b = seq.entries[(n - 1) * 2 + i - 1];
      CHECK(b.segment == n);
      CHECK(b.tau == doctest::Approx(p.times[n - 1] + i * 1.25 / 3).epsilon(1e-14));
      CHECK(b.tau > p.times[n - 1]);
      CHECK(b.tau < p.times[n]);
      CHECK((b.center - gamma(p, b.tau)).norm() == 0.0);
    }
  CHECK_THROWS_AS(build_corridors(f, p, 0, 0.9, {0.05, 1.0}), Error);
}

TEST_CASE("unclamped boxes are inscribed in the clearance ball") {
  std::mt19937_64 rng(12);
  const VoxelGrid g = oracle::random_grid(rng, {16, 16, 8}, 0.03, 0.4);
  const DistanceField f = compute_edf(g);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const CorridorLimits limits{1e-3, 10.0};
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec3 x = f.origin() + (f.upper() - f.origin()).cwiseProduct(Vec3(u(rng), u(rng), u(rng)));
    const double phi = oracle::interp(f, x);
    if (phi <= limits.min_half_extent * std::sqrt(3.0) * 2) continue;
    const WaypointPlan p = make_plan({0, 1}, {x, x});
    for (double shrink : {0.5, 0.9, 1.0}) {
      const CorridorBox b = corridor_at(f, p, 0.5, shrink, limits);
      // The half diagonal of the cube equals shrink * phi.
      CHECK(b.half_extent.norm() == doctest::Approx(shrink * phi).epsilon(1e-9));
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("larger shrink never yields smaller boxes") {
  std::mt19937_64 rng(13);
  const DistanceField f = compute_edf(oracle::random_grid(rng, {16, 16, 8}, 0.03, 0.4));
  const WaypointPlan p = make_plan({0, 2}, {Vec3(0.7, 0.9, 0.8), Vec3(5.5, 5.7, 2.3)});
  const CorridorLimits limits{1e-4, 1.0};
  double prev = 0.0;
  for (double shrink : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    double total = 0.0;
    try {
      for (const auto& b : build_corridors(f, p, 5, shrink, limits).entries) total += b.half_extent.x();
    } catch (const Error&) {
      continue;
    }
    CHECK(total >= prev);
    prev = total;
  }
}
