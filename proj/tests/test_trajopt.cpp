#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "plan_fixtures.hpp"
#include "vischase/error.hpp"
#include "vischase/trajopt.hpp"

using namespace vischase;
using testutil::make_plan;

namespace {

WaypointPlan zigzag() {
  return make_plan({0, 1.25, 2.5, 3.75, 5.0},
                   {Vec3(1, 1, 1), Vec3(2, 1.5, 1.2), Vec3(3, 1, 1.5), Vec3(4, 1.6, 1.4), Vec3(5, 1, 1.6)});
}

// Boxes centered on the straight chords at M interior times per segment.
CorridorSequence chord_boxes(const WaypointPlan& p, int M, double half) {
  CorridorSequence seq;
  for (int n = 1; n <= p.N(); ++n)
    for (int i = 1; i <= M; ++i) {
      CorridorBox b;
      b.segment = n;
      b.tau = p.times[n - 1] + i * (p.times[n] - p.times[n - 1]) / (M + 1);
      b.center = gamma(p, b.tau);
      b.half_extent = Vec3::Constant(half);
      seq.entries.push_back(b);
    }
  return seq;
}

ChaserState at_rest(const Vec3& x) {
  ChaserState s;
  s.position = x;
  return s;
}

PiecewisePolynomial solve(const ChaserState& s, const WaypointPlan& p, const CorridorSequence& c, double lambda,
                          int K = 6) {
  std::vector<Eigen::VectorXd> sols;
  for (int a = 0; a < 3; ++a) sols.push_back(solve_qp(assemble_axis_qp(s, p, c, lambda, K, a)).x);
  return trajectory_from_solution(p.times, K, sols);
}

double tracking_error(const PiecewisePolynomial& traj, const WaypointPlan& p) {
  double e = 0.0;
  for (int n = 1; n <= p.N(); ++n) e += (traj.eval(p.times[n]) - p.waypoints[n]).squaredNorm();
  return e;
}

}  // namespace

TEST_CASE("jerk Gram matrix") {
  CHECK(jerk_gram(1.7, 3)(3, 3) == doctest::Approx(36 * 1.7).epsilon(1e-15));
  CHECK(jerk_gram(2.0, 3).norm() == doctest::Approx(72.0));
  CHECK(jerk_gram(2.0, 2).norm() == 0.0);
  const double T = 1.3;
  const Eigen::MatrixXd G = jerk_gram(T, 6);
  for (int k = 0; k <= 6; ++k)
    for (int l = 0; l <= 6; ++l) {
      const double ref = oracle::simpson(
          [&](double s) { return basis_row(6, s, 3)[k] * basis_row(6, s, 3)[l]; }, 0.0, T, 2048);
      CHECK(G(k, l) == doctest::Approx(ref).epsilon(1e-9));
    }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
}

TEST_CASE("basis rows carry the falling factorials") {
  const Eigen::RowVectorXd r = basis_row(6, 2.0, 2);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 2.0);
  CHECK(r[3] == 12.0);
  CHECK(r[6] == 30.0 * 16.0);
}

TEST_CASE("axis QP dimensions for four segments of sixth order with two boxes each") {
  const WaypointPlan p = zigzag();
  const QuadraticProgram qp = assemble_axis_qp(at_rest(p.waypoints[0]), p, chord_boxes(p, 2, 0.4), 2.0, 6, 0);
  CHECK(qp.dimension() == 28);
  CHECK(qp.equality_count() == 12);
  CHECK(qp.inequality_rows() == 8);
  int half_spaces = 0;
  for (int r = 0; r < qp.inequality_rows(); ++r) half_spaces += std::isfinite(qp.lower[r]) + std::isfinite(qp.upper[r]);
  CHECK(half_spaces == 16);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qp.P);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  CHECK((qp.P - qp.P.transpose()).norm() == 0.0);
}

TEST_CASE("joint QP is block diagonal and agrees with the per-axis solves") {
  const WaypointPlan p = zigzag();
  const ChaserState s = at_rest(p.waypoints[0]);
  const CorridorSequence boxes = chord_boxes(p, 2, 0.15);
  const QuadraticProgram joint = assemble_qp(s, p, boxes, 2.0, 6);
  const int n = 28;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b) {
        CHECK(joint.P.block(a * n, b * n, n, n).norm() == 0.0);
        CHECK(joint.A_eq.block(a * 12, b * n, 12, n).norm() == 0.0);
        CHECK(joint.C.block(a * 8, b * n, 8, n).norm() == 0.0);
      }
  const QpSolution js = solve_qp(joint);
  CHECK(kkt_residuals(joint, js).max() <= 1e-6);
  for (int a = 0; a < 3; ++a) {
    const QuadraticProgram axis = assemble_axis_qp(s, p, boxes, 2.0, 6, a);
    const QpSolution as = solve_qp(axis);
    CHECK(kkt_residuals(axis, as).max() <= 1e-6);
    CHECK(std::abs(axis.objective(as.x) - axis.objective(js.x.segment(a * n, n))) <= 1e-7);
  }
}

TEST_CASE("resting chaser with coincident waypoints stays put") {
  const Vec3 x(2, 3, 1);
  const WaypointPlan p = make_plan({0, 1, 2, 3}, {x, x, x, x});
  const PiecewisePolynomial traj = solve(at_rest(x), p, chord_boxes(p, 2, 0.3), 2.0);
  for (double t = 0; t <= 3.0; t += 0.1) {
    CHECK((traj.eval(t) - x).norm() < 1e-6);
    CHECK(traj.eval(t, 1).norm() < 1e-5);
  }
}

TEST_CASE("waypoints on a constant-velocity line are followed exactly") {
  const Vec3 x0(1, 1, 1), v(0.8, -0.3, 0.2);
  std::vector<double> t{0, 1.25, 2.5, 3.75, 5.0};
  std::vector<Vec3> w;
  for (double ti : t) w.push_back(x0 + ti * v);
  const WaypointPlan p = make_plan(t, w);
  ChaserState s = at_rest(x0);
  s.velocity = v;
  const PiecewisePolynomial traj = solve(s, p, chord_boxes(p, 2, 0.3), 2.0);
  for (double tau = 0; tau <= 5.0; tau += 0.05) {
    CHECK((traj.eval(tau) - (x0 + tau * v)).norm() < 1e-5);
    CHECK((traj.eval(tau, 1) - v).norm() < 1e-4);
  }
}

TEST_CASE("raising lambda never worsens waypoint tracking") {
  const WaypointPlan p = zigzag();
  const ChaserState s = at_rest(p.waypoints[0]);
  const CorridorSequence none;
  const double first = tracking_error(solve(s, p, none, 0.1), p);
  double prev = first;
  for (double lambda : {0.5, 2.0, 8.0, 32.0, 128.0, 1e4}) {
    const double e = tracking_error(solve(s, p, none, lambda), p);
    CAPTURE(lambda);
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
  CHECK(prev < 0.01 * first);
}

TEST_CASE("solution meets the initial state, stays C2 and respects every box") {
  const WaypointPlan p = zigzag();
  ChaserState s = at_rest(p.waypoints[0]);
  s.velocity = Vec3(0.5, 0.2, 0);
  s.acceleration = Vec3(0, 0.1, -0.1);
  const CorridorSequence boxes = chord_boxes(p, 2, 0.1);
  const PiecewisePolynomial traj = solve(s, p, boxes, 2.0);
  CHECK((traj.eval(0.0) - s.position).norm() < 1e-9);
  CHECK((traj.eval(0.0, 1) - s.velocity).norm() < 1e-9);
  CHECK((traj.eval(0.0, 2) - s.acceleration).norm() < 1e-9);
  for (int n = 1; n < p.N(); ++n) {
    const double T = p.times[n] - p.times[n - 1];
    for (int r = 0; r <= 2; ++r)
      CHECK((traj.eval_segment(n - 1, T, r) - traj.eval_segment(n, 0.0, r)).norm() < 1e-7);
  }
  for (const auto& b : boxes.entries) {
    const Vec3 x = traj.eval(b.tau);
    CHECK(((x - b.lower()).array() >= -1e-8).all());
    CHECK(((b.upper() - x).array() >= -1e-8).all());
  }
}

TEST_CASE("derivatives agree with finite differences") {
  const WaypointPlan p = zigzag();
  const PiecewisePolynomial traj = solve(at_rest(p.waypoints[0]), p, chord_boxes(p, 2, 0.3), 2.0);
  const double h = 1e-5;
  for (double t : {0.3, 1.0, 2.0, 3.1, 4.6}) {
    for (int r = 1; r <= 3; ++r) {
      const Vec3 fd = (traj.eval(t + h, r - 1) - traj.eval(t - h, r - 1)) / (2 * h);
      CHECK((traj.eval(t, r) - fd).norm() <= 1e-4 * (1 + fd.norm()));
    }
  }
  CHECK_THROWS_AS(traj.eval(5.0001), Error);
  CHECK_THROWS_AS(traj.eval(-0.0001), Error);
  CHECK_THROWS_AS(traj.eval(1.0, 4), Error);
  CHECK_NOTHROW(traj.eval(5.0));
}

TEST_CASE("assembly rejects inconsistent timestamps") {
  const WaypointPlan p = zigzag();
  ChaserState s = at_rest(p.waypoints[0]);
  s.stamp = 0.5;
  try {
    assemble_axis_qp(s, p, {}, 2.0, 6, 0);
    FAIL("expected rejection");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
    CHECK(std::string(e.what()).find("inconsistent timestamps") != std::string::npos);
  }
  s.stamp = 0.0;
  CorridorSequence wrong = chord_boxes(p, 1, 0.3);
  wrong.entries[0].segment = 3;
  CHECK_THROWS_AS(assemble_axis_qp(s, p, wrong, 2.0, 6, 0), Error);
}

TEST_CASE("yaw faces the target and holds when directly overhead") {
  const WaypointPlan p = make_plan({0, 1}, {Vec3(0, 0, 2), Vec3(0, 0, 2)});
  const PiecewisePolynomial traj = solve(at_rest(Vec3(0, 0, 2)), p, {}, 2.0);
  const TargetPath east({{0.0, Vec3(3, 0, 1)}});
  const TargetPath north({{0.0, Vec3(0, 2, 1)}});
  const TargetPath below({{0.0, Vec3(0, 0, 0)}});
  CHECK(yaw_reference(traj, east, 0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(yaw_reference(traj, north, 0.5) == doctest::Approx(M_PI / 2));
  CHECK(yaw_reference(traj, below, 0.5, 1.25) == 1.25);
}
