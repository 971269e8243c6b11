#include "vischase/trajopt.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vischase/error.hpp"

namespace vischase {

namespace {

// k! / (k - r)!, zero when r > k.
double falling(int k, int r) {
  if (r > k) return 0.0;
  double v = 1.0;
  for (int i = 0; i < r; ++i) v *= (k - i);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// PiecewisePolynomial

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> knots, int order, std::vector<Eigen::MatrixXd> coeffs)
    : knots_(std::move(knots)), order_(order), coeffs_(std::move(coeffs)) {
  if (knots_.size() < 2 || coeffs_.size() + 1 != knots_.size())
    throw Error(ErrorKind::InvalidInput, "trajectory", "knot and segment counts are inconsistent");
  for (const auto& c : coeffs_)
    if (c.rows() != 3 || c.cols() != order + 1)
      throw Error(ErrorKind::InvalidInput, "trajectory", "coefficient block has the wrong shape");
}

Eigen::RowVectorXd basis_row(int K, double s, int derivative) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(K + 1);
  for (int k = derivative; k <= K; ++k) row[k] = falling(k, derivative) * std::pow(s, k - derivative);
  return row;
}

Vec3 PiecewisePolynomial::eval_segment(int segment, double s, int derivative) const {
  const Eigen::RowVectorXd b = basis_row(order_, s, derivative);
  return coeffs_[segment] * b.transpose();
}

Vec3 PiecewisePolynomial::eval(double tau, int derivative) const {
  if (derivative < 0 || derivative > 3)
    throw Error(ErrorKind::InvalidInput, "trajectory", "derivative order must be 0..3");
  if (!(tau >= knots_.front() && tau <= knots_.back())) {
    std::ostringstream msg;
    msg << "time " << tau << " outside the trajectory domain [" << knots_.front() << ", " << knots_.back() << "]";
    throw Error(ErrorKind::OutOfRange, "trajectory", msg.str());
  }
  int seg = 0;
  while (seg + 1 < segments() && tau >= knots_[seg + 1]) ++seg;
  return eval_segment(seg, tau - knots_[seg], derivative);
}

// ---------------------------------------------------------------------------
// Cost

Eigen::MatrixXd jerk_gram(double T, int K) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K + 1, K + 1);
  for (int k = 3; k <= K; ++k)
    for (int l = 3; l <= K; ++l) {
      const int p = k + l - 5;  // exponent after integrating s^(k-3) s^(l-3)
      G(k, l) = falling(k, 3) * falling(l, 3) * std::pow(T, p) / p;
    }
  return G;
}

std::vector<Eigen::MatrixXd> jerk_cost(const std::vector<double>& knots, int K) {
  std::vector<Eigen::MatrixXd> out;
  for (std::size_t n = 1; n < knots.size(); ++n) out.push_back(jerk_gram(knots[n] - knots[n - 1], K));
  return out;
}

// ---------------------------------------------------------------------------
// Assembly

QuadraticProgram assemble_axis_qp(const ChaserState& state, const WaypointPlan& plan,
                                  const CorridorSequence& corridors, double lambda, int K, int axis) {
  const int N = plan.N();
  if (N < 1) throw Error(ErrorKind::InvalidInput, "qp_assembly", "plan has no segments");
  if (K < 3) throw Error(ErrorKind::InvalidInput, "qp_assembly", "polynomial order must be at least 3");
  if (std::abs(state.stamp - plan.times.front()) > 1e-9) {
    std::ostringstream msg;
    msg << "inconsistent timestamps: state at " << state.stamp << ", plan starts at " << plan.times.front();
    throw Error(ErrorKind::InvalidInput, "qp_assembly", msg.str());
  }
  const int w = K + 1;
  const int n = N * w;
  QuadraticProgram qp = QuadraticProgram::zeros(n);

  for (int s = 0; s < N; ++s) {
    const double T = plan.times[s + 1] - plan.times[s];
    if (!(T > 0)) throw Error(ErrorKind::InvalidInput, "qp_assembly", "inconsistent timestamps: knots must increase");
    qp.P.block(s * w, s * w, w, w) += 2.0 * jerk_gram(T, K);
    const Eigen::RowVectorXd b = basis_row(K, T, 0);
    qp.P.block(s * w, s * w, w, w) += 2.0 * lambda * b.transpose() * b;
    qp.q.segment(s * w, w) += -2.0 * lambda * plan.waypoints[s + 1][axis] * b.transpose();
  }
  qp.P += kCostRegularization * Eigen::MatrixXd::Identity(n, n);
  qp.P = 0.5 * (qp.P + qp.P.transpose());

  // Initial state and C0..C2 continuity at interior knots.
  const int m = 3 + 3 * (N - 1);
  qp.A_eq = Eigen::MatrixXd::Zero(m, n);
  qp.b_eq = Eigen::VectorXd::Zero(m);
  const double init[3] = {state.position[axis], state.velocity[axis], state.acceleration[axis]};
  for (int r = 0; r < 3; ++r) {
    qp.A_eq.block(r, 0, 1, w) = basis_row(K, 0.0, r);
    qp.b_eq[r] = init[r];
  }
  for (int s = 1; s < N; ++s) {
    const double T = plan.times[s] - plan.times[s - 1];
    for (int r = 0; r < 3; ++r) {
      const int row = 3 + 3 * (s - 1) + r;
      qp.A_eq.block(row, (s - 1) * w, 1, w) = basis_row(K, T, r);
      qp.A_eq.block(row, s * w, 1, w) = -basis_row(K, 0.0, r);
    }
  }

  // Corridor boxes at the subsample times.
  const int rows = static_cast<int>(corridors.entries.size());
  qp.C = Eigen::MatrixXd::Zero(rows, n);
  qp.lower = Eigen::VectorXd::Zero(rows);
  qp.upper = Eigen::VectorXd::Zero(rows);
  for (int r = 0; r < rows; ++r) {
    const CorridorBox& box = corridors.entries[r];
    const int s = box.segment - 1;
    if (s < 0 || s >= N || !(box.tau >= plan.times[s] && box.tau <= plan.times[s + 1])) {
      std::ostringstream msg;
      msg << "inconsistent timestamps: corridor at tau=" << box.tau << " does not fall in segment " << box.segment;
      throw Error(ErrorKind::InvalidInput, "qp_assembly", msg.str());
    }
    qp.C.block(r, s * w, 1, w) = basis_row(K, box.tau - plan.times[s], 0);
    qp.lower[r] = box.center[axis] - box.half_extent[axis];
    qp.upper[r] = box.center[axis] + box.half_extent[axis];
  }
  return qp;
}

QuadraticProgram assemble_qp(const ChaserState& state, const WaypointPlan& plan, const CorridorSequence& corridors,
                             double lambda, int K) {
  QuadraticProgram axes[3];
  for (int a = 0; a < 3; ++a) axes[a] = assemble_axis_qp(state, plan, corridors, lambda, K, a);
  const int n = axes[0].dimension();
  const int m = axes[0].equality_count();
  const int r = axes[0].inequality_rows();
  QuadraticProgram qp = QuadraticProgram::zeros(3 * n);
  qp.A_eq = Eigen::MatrixXd::Zero(3 * m, 3 * n);
  qp.b_eq = Eigen::VectorXd::Zero(3 * m);
  qp.C = Eigen::MatrixXd::Zero(3 * r, 3 * n);
  qp.lower = Eigen::VectorXd::Zero(3 * r);
  qp.upper = Eigen::VectorXd::Zero(3 * r);
  for (int a = 0; a < 3; ++a) {
    qp.P.block(a * n, a * n, n, n) = axes[a].P;
    qp.q.segment(a * n, n) = axes[a].q;
    qp.A_eq.block(a * m, a * n, m, n) = axes[a].A_eq;
    qp.b_eq.segment(a * m, m) = axes[a].b_eq;
    if (r > 0) {
      qp.C.block(a * r, a * n, r, n) = axes[a].C;
      qp.lower.segment(a * r, r) = axes[a].lower;
      qp.upper.segment(a * r, r) = axes[a].upper;
    }
  }
  return qp;
}

PiecewisePolynomial trajectory_from_solution(const std::vector<double>& knots, int K,
                                             const std::vector<Eigen::VectorXd>& axis_solutions) {
  const int N = static_cast<int>(knots.size()) - 1;
  std::vector<Eigen::MatrixXd> coeffs(N, Eigen::MatrixXd::Zero(3, K + 1));
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < N; ++s) coeffs[s].row(a) = axis_solutions[a].segment(s * (K + 1), K + 1).transpose();
  return PiecewisePolynomial(knots, K, std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Composite

TrajectoryResult generate_trajectory(const ChaserState& state, const WaypointPlan& plan,
                                     const CorridorSequence& corridors, const PlannerConfig& cfg,
                                     const DistanceField* field) {
  auto attempt = [&](const CorridorSequence& boxes, TrajectoryResult& out) {
    std::vector<Eigen::VectorXd> sols;
    int iterations = 0;
    for (int a = 0; a < 3; ++a) {
      const QpSolution sol = solve_qp(assemble_axis_qp(state, plan, boxes, cfg.lambda, cfg.K, a));
      iterations += sol.iterations;
      sols.push_back(sol.x);
    }
    out.trajectory = trajectory_from_solution(plan.times, cfg.K, sols);
    out.corridors = boxes;
    out.qp_iterations = iterations;
  };

  TrajectoryResult result;
  try {
    attempt(corridors, result);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Infeasible || field == nullptr || corridors.shrink >= 1.0) throw;
    const CorridorSequence relaxed =
        build_corridors(*field, plan, cfg.M, 1.0, CorridorLimits::defaults(*field, cfg));
    attempt(relaxed, result);
    result.relaxed = true;
  }
  return result;
}

double yaw_reference(const PiecewisePolynomial& trajectory, const TargetPath& target, double tau,
                     double previous_yaw) {
  const Vec3 d = target.position(tau) - trajectory.eval(tau, 0);
  if (std::hypot(d.x(), d.y()) < 1e-6) return previous_yaw;
  return std::atan2(d.y(), d.x());
}

}  // namespace vischase
