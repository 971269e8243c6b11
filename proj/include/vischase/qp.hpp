#pragma once

#include <Eigen/Dense>

namespace vischase {

/// minimize   1/2 x' P x + q' x
/// subject to A_eq x = b_eq,   lower <= C x <= upper
///
/// Two-sided rows are stored once; use +/-infinity for an absent side.
struct QuadraticProgram {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd C;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  int dimension() const { return static_cast<int>(q.size()); }
  int equality_count() const { return static_cast<int>(A_eq.rows()); }
  int inequality_rows() const { return static_cast<int>(C.rows()); }

  /// Empty program of the given dimension.
  static QuadraticProgram zeros(int n);

  /// Throws InvalidInput on inconsistent shapes or an asymmetric P.
  void validate() const;
  double objective(const Eigen::VectorXd& x) const;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd eq_multipliers;  // nu:  P x + q = A_eq' nu + C' z
  Eigen::VectorXd row_multipliers; // z:  > 0 at the lower bound, < 0 at the upper bound
  int iterations = 0;
};

struct QpOptions {
  int max_iterations = 0;          // 0 selects 10 * (n + 2 * rows) + 50
  double feasibility_tol = 1e-9;
};

/// Dense dual active-set method (Goldfarb-Idnani) after eliminating the
/// equality constraints through a null-space basis. Throws Infeasible when
/// the constraints admit no point, Numerical on iteration limit.
QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& options = {});

struct KktResiduals {
  double stationarity = 0.0;
  double primal_equality = 0.0;
  double primal_inequality = 0.0;
  double dual = 0.0;             // wrong-sign multipliers
  double complementarity = 0.0;

  double max() const;
};

KktResiduals kkt_residuals(const QuadraticProgram& qp, const QpSolution& sol);

}  // namespace vischase
