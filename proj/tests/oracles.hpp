#pragma once

// Independent reference implementations used to check the library. They
// favour obviousness over speed and share no code with src/.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "vischase/fields.hpp"
#include "vischase/preplan.hpp"
#include "vischase/qp.hpp"
#include "vischase/world.hpp"

namespace oracle {

using vischase::Index3;
using vischase::Vec3;

/// O(n * m) nearest occupied voxel center for every voxel.
inline std::vector<double> brute_edt(const vischase::VoxelGrid& g) {
  const auto& d = g.dims();
  std::vector<Index3> occ;
  for (int k = 0; k < d[2]; ++k)
    for (int j = 0; j < d[1]; ++j)
      for (int i = 0; i < d[0]; ++i)
        if (g.occupied({i, j, k})) occ.push_back({i, j, k});
  const double res = g.resolution();
  const double sentinel = res * std::sqrt(double(d[0]) * d[0] + double(d[1]) * d[1] + double(d[2]) * d[2]);
  std::vector<double> out(g.size(), sentinel);
  if (occ.empty()) return out;
  for (int k = 0; k < d[2]; ++k)
    for (int j = 0; j < d[1]; ++j)
      for (int i = 0; i < d[0]; ++i) {
        long best = std::numeric_limits<long>::max();
        for (const auto& o : occ) {
          const long di = i - o[0], dj = j - o[1], dk = k - o[2];
          best = std::min(best, di * di + dj * dj + dk * dk);
        }
        out[g.linear({i, j, k})] = res * std::sqrt(double(best));
      }
  return out;
}

/// Trilinear interpolation written directly against the stored values.
inline double interp(const vischase::DistanceField& f, const Vec3& x) {
  const auto& d = f.dims();
  double u[3];
  int lo[3];
  double w[3];
  for (int a = 0; a < 3; ++a) {
    u[a] = (x[a] - f.origin()[a]) / f.resolution() - 0.5;
    u[a] = std::clamp(u[a], 0.0, double(d[a] - 1));
    lo[a] = std::min(int(std::floor(u[a])), std::max(d[a] - 2, 0));
    w[a] = u[a] - lo[a];
  }
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    Index3 idx;
    double weight = 1.0;
    for (int a = 0; a < 3; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = std::min(lo[a] + bit, d[a] - 1);
      weight *= bit ? w[a] : 1.0 - w[a];
    }
    if (weight != 0.0) acc += weight * f.value(idx);
  }
  return acc;
}

/// Min of the field along a segment at a fixed fine spacing.
inline double fine_segment_min(const vischase::DistanceField& f, const Vec3& a, const Vec3& b, double step) {
  const double len = (b - a).norm();
  const int n = std::max(1, int(std::ceil(len / step)));
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) m = std::min(m, interp(f, a + (b - a) * (double(i) / n)));
  return m;
}

/// Trapezoid rule on max(psi, 0) along a-b at a fixed fine spacing; psi
/// itself comes from fine_segment_min at `psi_step`.
inline double fine_line_integral(const vischase::DistanceField& f, const Vec3& a, const Vec3& b, const Vec3& xp,
                                 double step, double psi_step) {
  const double len = (b - a).norm();
  const int n = std::max(1, int(std::ceil(len / step)));
  double acc = 0.0;
  double prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double v = std::max(0.0, fine_segment_min(f, a + (b - a) * (double(i) / n), xp, psi_step));
    if (i > 0) acc += 0.5 * (prev + v) * (len / n);
    prev = v;
  }
  return acc;
}

/// Voxel traversal (Amanatides-Woo) from a to b; true when any visited
/// voxel is occupied.
inline bool raycast_blocked(const vischase::VoxelGrid& g, const Vec3& a, const Vec3& b) {
  const double res = g.resolution();
  const auto& d = g.dims();
  Vec3 pa = (a - g.origin()) / res;
  Vec3 pb = (b - g.origin()) / res;
  int idx[3], step[3];
  double tmax[3], tdelta[3];
  const Vec3 dir = pb - pa;
  for (int k = 0; k < 3; ++k) {
    idx[k] = std::clamp(int(std::floor(pa[k])), 0, d[k] - 1);
    if (dir[k] > 0) {
      step[k] = 1;
      tmax[k] = (idx[k] + 1 - pa[k]) / dir[k];
      tdelta[k] = 1.0 / dir[k];
    } else if (dir[k] < 0) {
      step[k] = -1;
      tmax[k] = (pa[k] - idx[k]) / -dir[k];
      tdelta[k] = -1.0 / dir[k];
    } else {
      step[k] = 0;
      tmax[k] = tdelta[k] = std::numeric_limits<double>::infinity();
    }
  }
  while (true) {
    if (g.occupied({idx[0], idx[1], idx[2]})) return true;
    int axis = 0;
    if (tmax[1] < tmax[axis]) axis = 1;
    if (tmax[2] < tmax[axis]) axis = 2;
    if (tmax[axis] > 1.0) return false;
    idx[axis] += step[axis];
    if (idx[axis] < 0 || idx[axis] >= d[axis]) return false;
    tmax[axis] += tdelta[axis];
  }
}

/// Segment versus every occupied voxel cube grown by `inflate` on each side
/// (slab test). Negative inflate shrinks the cubes.
inline bool segment_hits_cubes(const vischase::VoxelGrid& g, const std::vector<Index3>& occupied, const Vec3& a,
                               const Vec3& b, double inflate) {
  const double h = 0.5 * g.resolution() + inflate;
  if (h <= 0) return false;
  const Vec3 dir = b - a;
  for (const auto& o : occupied) {
    const Vec3 c = g.index_to_center(o);
    double t0 = 0.0, t1 = 1.0;
    bool hit = true;
    for (int k = 0; k < 3 && hit; ++k) {
      const double lo = c[k] - h - a[k], hi = c[k] + h - a[k];
      if (dir[k] == 0.0) {
        if (lo > 0 || hi < 0) hit = false;
        continue;
      }
      double s0 = lo / dir[k], s1 = hi / dir[k];
      if (s0 > s1) std::swap(s0, s1);
      t0 = std::max(t0, s0);
      t1 = std::min(t1, s1);
      if (t0 > t1) hit = false;
    }
    if (hit) return true;
  }
  return false;
}

inline std::vector<Index3> occupied_voxels(const vischase::VoxelGrid& g) {
  std::vector<Index3> out;
  const auto& d = g.dims();
  for (int k = 0; k < d[2]; ++k)
    for (int j = 0; j < d[1]; ++j)
      for (int i = 0; i < d[0]; ++i)
        if (g.occupied({i, j, k})) out.push_back({i, j, k});
  return out;
}

/// Occupied voxels whose whole 26-neighbourhood (clipped to the grid) is
/// occupied too.
inline std::vector<Index3> interior_voxels(const vischase::VoxelGrid& g) {
  std::vector<Index3> out;
  const auto& d = g.dims();
  for (const auto& o : occupied_voxels(g)) {
    bool all = true;
    for (int a = -1; a <= 1 && all; ++a)
      for (int b = -1; b <= 1 && all; ++b)
        for (int c = -1; c <= 1 && all; ++c) {
          const Index3 q{o[0] + a, o[1] + b, o[2] + c};
          if (q[0] < 0 || q[1] < 0 || q[2] < 0 || q[0] >= d[0] || q[1] >= d[1] || q[2] >= d[2]) continue;
          all = g.occupied(q);
        }
    if (all) out.push_back(o);
  }
  return out;
}

/// Exhaustive minimum over all source-to-last-layer chains.
struct ChainResult {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<int> chain;  // candidate index per layer, 0 for the source
};

inline ChainResult enumerate_chains(const vischase::LayeredGraph& g) {
  const int N = g.N();
  // adjacency[n][from] -> list of (to, cost)
  std::vector<std::vector<std::vector<std::pair<int, double>>>> adj(N + 1);
  for (int n = 1; n <= N; ++n) {
    adj[n].resize(g.layers[n - 1].size());
    for (const auto& e : g.edges[n]) adj[n][e.from].push_back({e.to, e.cost.total});
  }
  ChainResult best;
  std::vector<int> chain{0};
  std::function<void(int, int, double)> walk = [&](int n, int node, double acc) {
    if (n == N) {
      if (acc < best.cost) {
        best.cost = acc;
        best.chain = chain;
      }
      return;
    }
    for (const auto& [to, c] : adj[n + 1][node]) {
      chain.push_back(to);
      walk(n + 1, to, acc + c);
      chain.pop_back();
    }
  };
  walk(0, 0, 0.0);
  return best;
}

/// Equality-constrained QP via the full saddle system.
inline Eigen::VectorXd kkt_equality_solve(const vischase::QuadraticProgram& qp) {
  const int n = qp.dimension(), m = qp.equality_count();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = qp.P;
  K.topRightCorner(n, m) = qp.A_eq.transpose();
  K.bottomLeftCorner(m, n) = qp.A_eq;
  Eigen::VectorXd rhs(n + m);
  rhs << -qp.q, qp.b_eq;
  return K.fullPivLu().solve(rhs).head(n);
}

/// Composite Simpson rule.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  if (intervals % 2) ++intervals;
  const double h = (b - a) / intervals;
  double s = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Random occupancy grid with the given fraction of occupied voxels.
inline vischase::VoxelGrid random_grid(std::mt19937_64& rng, const Index3& dims, double fraction, double res) {
  vischase::VoxelGrid g(Vec3::Zero(), res, dims);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < dims[2]; ++k)
    for (int j = 0; j < dims[1]; ++j)
      for (int i = 0; i < dims[0]; ++i)
        if (u(rng) < fraction) g.set_occupied({i, j, k}, true);
  return g;
}

}  // namespace oracle
