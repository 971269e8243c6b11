#include "vischase/qp.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "vischase/error.hpp"

namespace vischase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One side of a two-sided row, written as n' y >= b in reduced coordinates.
struct HalfSpace {
  int row;
  int side;  // +1 lower bound, -1 upper bound
};

}  // namespace

QuadraticProgram QuadraticProgram::zeros(int n) {
  QuadraticProgram qp;
  qp.P = Eigen::MatrixXd::Zero(n, n);
  qp.q = Eigen::VectorXd::Zero(n);
  qp.A_eq = Eigen::MatrixXd::Zero(0, n);
  qp.b_eq = Eigen::VectorXd::Zero(0);
  qp.C = Eigen::MatrixXd::Zero(0, n);
  qp.lower = Eigen::VectorXd::Zero(0);
  qp.upper = Eigen::VectorXd::Zero(0);
  return qp;
}

void QuadraticProgram::validate() const {
  const auto n = q.size();
  auto bad = [](const std::string& m) { throw Error(ErrorKind::InvalidInput, "qp", m); };
  if (P.rows() != n || P.cols() != n) bad("cost matrix shape does not match the dimension");
  if (A_eq.cols() != n || A_eq.rows() != b_eq.size()) bad("equality constraint shapes are inconsistent");
  if (C.cols() != n || C.rows() != lower.size() || C.rows() != upper.size())
    bad("inequality constraint shapes are inconsistent");
  if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff()))
    bad("cost matrix is not symmetric");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) bad("inequality row " + std::to_string(i) + " has lower > upper");
}

double QuadraticProgram::objective(const Eigen::VectorXd& x) const { return 0.5 * x.dot(P * x) + q.dot(x); }

double KktResiduals::max() const {
  return std::max({stationarity, primal_equality, primal_inequality, dual, complementarity});
}

KktResiduals kkt_residuals(const QuadraticProgram& qp, const QpSolution& sol) {
  KktResiduals r;
  const Eigen::VectorXd& x = sol.x;
  Eigen::VectorXd grad = qp.P * x + qp.q;
  if (qp.equality_count() > 0) grad -= qp.A_eq.transpose() * sol.eq_multipliers;
  if (qp.inequality_rows() > 0) grad -= qp.C.transpose() * sol.row_multipliers;
  r.stationarity = grad.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (qp.equality_count() > 0) r.primal_equality = (qp.A_eq * x - qp.b_eq).cwiseAbs().maxCoeff();
  if (qp.inequality_rows() > 0) {
    const Eigen::VectorXd cx = qp.C * x;
    for (Eigen::Index i = 0; i < cx.size(); ++i) {
      r.primal_inequality = std::max({r.primal_inequality, qp.lower[i] - cx[i], cx[i] - qp.upper[i]});
      const double z = sol.row_multipliers[i];
      if (z > 0) {
        if (qp.lower[i] == -kInf) r.dual = std::max(r.dual, z);
        else r.complementarity = std::max(r.complementarity, std::abs(z * (cx[i] - qp.lower[i])));
      } else if (z < 0) {
        if (qp.upper[i] == kInf) r.dual = std::max(r.dual, -z);
        else r.complementarity = std::max(r.complementarity, std::abs(z * (qp.upper[i] - cx[i])));
      }
    }
  }
  return r;
}

QpSolution solve_qp(const QuadraticProgram& qp, const QpOptions& options) {
  qp.validate();
  const int n = qp.dimension();
  const int m_eq = qp.equality_count();
  const int rows = qp.inequality_rows();

  // Null-space elimination: x = x0 + Z y with A_eq Z = 0.
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(n, n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> eq_qr;
  if (m_eq > 0) {
    eq_qr.compute(qp.A_eq.transpose());
    const int rank = static_cast<int>(eq_qr.rank());
    const Eigen::MatrixXd Q = eq_qr.householderQ();
    Z = Q.rightCols(n - rank);
    x0 = qp.A_eq.completeOrthogonalDecomposition().solve(qp.b_eq);
    const double eq_err = (qp.A_eq * x0 - qp.b_eq).cwiseAbs().maxCoeff();
    if (eq_err > 1e-8 * std::max(1.0, qp.b_eq.cwiseAbs().maxCoeff()))
      throw Error(ErrorKind::Infeasible, "qp", "QP infeasible: equality constraints are inconsistent");
  }
  const int nr = static_cast<int>(Z.cols());

  Eigen::MatrixXd H = Z.transpose() * qp.P * Z;
  H = 0.5 * (H + H.transpose());
  const Eigen::VectorXd g = Z.transpose() * (qp.P * x0 + qp.q);

  // Half-spaces in reduced coordinates: normal' y >= bound.
  Eigen::MatrixXd Cr = qp.C * Z;
  const Eigen::VectorXd c0 = qp.C * x0;
  std::vector<HalfSpace> spaces;
  for (int i = 0; i < rows; ++i) {
    if (qp.lower[i] > -kInf) spaces.push_back({i, +1});
    if (qp.upper[i] < kInf) spaces.push_back({i, -1});
  }
  auto normal = [&](const HalfSpace& h) -> Eigen::VectorXd { return h.side * Cr.row(h.row).transpose(); };
  auto bound = [&](const HalfSpace& h) {
    return h.side > 0 ? qp.lower[h.row] - c0[h.row] : -(qp.upper[h.row] - c0[h.row]);
  };
  auto violation = [&](const HalfSpace& h, const Eigen::VectorXd& y) { return bound(h) - normal(h).dot(y); };

  QpSolution sol;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(nr);
  if (nr > 0) {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::Numerical, "qp", "reduced cost matrix is not positive definite");
    y = llt.solve(-g);
  }

  std::vector<HalfSpace> active;
  std::vector<double> mult;  // multipliers of `active`
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : 10 * (nr + 2 * rows) + 50;
  int iter = 0;

  auto is_active = [&](const HalfSpace& h) {
    for (const auto& a : active)
      if (a.row == h.row) return true;  // the two sides of one row are never both active
    return false;
  };

  auto residuals_msg = [&](const char* what) {
    std::ostringstream msg;
    msg << what << " after " << iter << " iterations";
    return msg.str();
  };

  while (true) {
    // Most violated inactive half-space.
    int pick = -1;
    double worst = options.feasibility_tol * 1.0;
    for (int s = 0; s < static_cast<int>(spaces.size()); ++s) {
      if (is_active(spaces[s])) continue;
      const double scale = 1.0 + std::abs(bound(spaces[s]));
      const double v = violation(spaces[s], y) / scale;
      if (v > worst) {
        worst = v;
        pick = s;
      }
    }
    if (pick < 0) break;

    const HalfSpace add = spaces[pick];
    const Eigen::VectorXd n_add = normal(add);
    double t_plus = 0.0;
    while (true) {
      if (++iter > max_iter) {
        throw Error(ErrorKind::Numerical, "qp", residuals_msg("QP iteration limit reached"));
      }
      const int na = static_cast<int>(active.size());
      // [H  -N; N' 0] [dy; du] = [n_add; 0]
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nr + na, nr + na);
      K.topLeftCorner(nr, nr) = H;
      for (int a = 0; a < na; ++a) {
        const Eigen::VectorXd na_vec = normal(active[a]);
        K.block(0, nr + a, nr, 1) = -na_vec;
        K.block(nr + a, 0, 1, nr) = na_vec.transpose();
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr + na);
      rhs.head(nr) = n_add;
      const Eigen::VectorXd d = K.fullPivLu().solve(rhs);
      const Eigen::VectorXd dy = d.head(nr);
      const Eigen::VectorXd du = d.tail(na);

      const double curvature = n_add.dot(dy);
      const bool primal_step = curvature > 1e-14 * std::max(1.0, n_add.squaredNorm());

      double t1 = kInf;
      int block = -1;
      for (int a = 0; a < na; ++a)
        if (du[a] < 0) {
          const double t = mult[a] / -du[a];
          if (t < t1) {
            t1 = t;
            block = a;
          }
        }
      const double t2 = primal_step ? violation(add, y) / curvature : kInf;

      if (t1 == kInf && t2 == kInf)
        throw Error(ErrorKind::Infeasible, "qp", "QP infeasible: constraints admit no feasible point");

      const double t = std::min(t1, t2);
      if (primal_step) y += t * dy;
      for (int a = 0; a < na; ++a) mult[a] += t * du[a];
      t_plus += t;

      if (t2 <= t1) {
        active.push_back(add);
        mult.push_back(t_plus);
        break;
      }
      active.erase(active.begin() + block);
      mult.erase(mult.begin() + block);
    }
  }

  sol.iterations = iter;
  sol.x = x0 + Z * y;
  sol.row_multipliers = Eigen::VectorXd::Zero(rows);
  for (std::size_t a = 0; a < active.size(); ++a) sol.row_multipliers[active[a].row] = active[a].side * mult[a];
  if (m_eq > 0) {
    const Eigen::VectorXd rhs = qp.P * sol.x + qp.q - (rows > 0 ? Eigen::VectorXd(qp.C.transpose() * sol.row_multipliers)
                                                              : Eigen::VectorXd::Zero(n));
    sol.eq_multipliers = eq_qr.solve(rhs);
  } else {
    sol.eq_multipliers = Eigen::VectorXd::Zero(0);
  }
  return sol;
}

}  // namespace vischase
