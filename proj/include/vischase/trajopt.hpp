#pragma once

#include <vector>

#include <Eigen/Dense>

#include "vischase/corridor.hpp"
#include "vischase/preplan.hpp"
#include "vischase/qp.hpp"

namespace vischase {

/// Piecewise polynomial chaser path. Segment n (1-based) covers
/// [t_{n-1}, t_n] and is expressed in local time s = tau - t_{n-1}:
///   x(tau) = sum_k coeffs[n-1](axis, k) * s^k.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() = default;
  PiecewisePolynomial(std::vector<double> knots, int order, std::vector<Eigen::MatrixXd> coeffs);

  const std::vector<double>& knots() const { return knots_; }
  int order() const { return order_; }
  int segments() const { return static_cast<int>(coeffs_.size()); }
  const std::vector<Eigen::MatrixXd>& coefficients() const { return coeffs_; }
  double start_time() const { return knots_.front(); }
  double end_time() const { return knots_.back(); }

  /// Derivative of the given order (0..3) at tau in [t_0, t_N].
  Vec3 eval(double tau, int derivative = 0) const;
  /// Evaluation of one segment at local time s (no domain check).
  Vec3 eval_segment(int segment, double s, int derivative) const;

 private:
  std::vector<double> knots_;
  int order_ = 0;
  std::vector<Eigen::MatrixXd> coeffs_;  // 3 x (order + 1) per segment
};

/// d^r/ds^r of the monomial basis 1, s, ..., s^K evaluated at s.
Eigen::RowVectorXd basis_row(int K, double s, int derivative);

/// Gram matrix of third derivatives over [0, T]: entry (k, l) is
/// the integral of (s^k)''' (s^l)''' ds.
Eigen::MatrixXd jerk_gram(double T, int K);

/// Per-segment jerk Gram matrices for the knot sequence.
std::vector<Eigen::MatrixXd> jerk_cost(const std::vector<double>& knots, int K);

/// QP for one axis over N * (K + 1) coefficients.
QuadraticProgram assemble_axis_qp(const ChaserState& state, const WaypointPlan& plan,
                                  const CorridorSequence& corridors, double lambda, int K, int axis);

/// Joint QP over 3 * N * (K + 1) coefficients, axis-major (x block, y block,
/// z block); the three blocks are decoupled.
QuadraticProgram assemble_qp(const ChaserState& state, const WaypointPlan& plan, const CorridorSequence& corridors,
                             double lambda, int K);

/// Tikhonov term added to every assembled cost matrix.
constexpr double kCostRegularization = 1e-10;

PiecewisePolynomial trajectory_from_solution(const std::vector<double>& knots, int K,
                                             const std::vector<Eigen::VectorXd>& axis_solutions);

struct TrajectoryResult {
  PiecewisePolynomial trajectory;
  CorridorSequence corridors;  // the set actually imposed
  bool relaxed = false;        // corridors were rebuilt with shrink 1.0
  int qp_iterations = 0;
};

/// Solves the three per-axis QPs. When `field` is given and the QP is
/// infeasible, the corridors are rebuilt once with shrink 1.0 and the solve
/// is retried.
TrajectoryResult generate_trajectory(const ChaserState& state, const WaypointPlan& plan,
                                     const CorridorSequence& corridors, const PlannerConfig& cfg,
                                     const DistanceField* field = nullptr);

/// Planar heading from the chaser toward the target; keeps `previous_yaw`
/// when the horizontal separation is below 1e-6 m.
double yaw_reference(const PiecewisePolynomial& trajectory, const TargetPath& target, double tau,
                     double previous_yaw = 0.0);

}  // namespace vischase
