#include <cmath>
#include <limits>
#include <vector>

#include "vischase/fields.hpp"

namespace vischase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared-distance transform over a strided line. Builds the lower
// envelope of the parabolas rooted at finite samples; all arithmetic stays
// on exact integers.
class LineTransform {
 public:
  explicit LineTransform(int max_len) : f_(max_len), v_(max_len), z_(max_len + 1) {}

  void run(double* data, int n, std::ptrdiff_t stride) {
    for (int q = 0; q < n; ++q) f_[q] = data[q * stride];

    int k = -1;
    for (int q = 0; q < n; ++q) {
      if (f_[q] == kInf) continue;
      const double fq = f_[q] + static_cast<double>(q) * q;
      double s = -kInf;
      while (k >= 0) {
        const int p = v_[k];
        s = (fq - (f_[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
        if (s > z_[k]) break;
        --k;
      }
      ++k;
      v_[k] = q;
      z_[k] = k == 0 ? -kInf : s;
      z_[k + 1] = kInf;
    }
    if (k < 0) return;  // no site on this line; leave it infinite

    int j = 0;
    for (int q = 0; q < n; ++q) {
      while (z_[j + 1] < q) ++j;
      const double d = static_cast<double>(q - v_[j]);
      data[q * stride] = d * d + f_[v_[j]];
    }
  }

 private:
  std::vector<double> f_;
  std::vector<int> v_;
  std::vector<double> z_;
};

}  // namespace

DistanceField compute_edf(const VoxelGrid& grid) {
  const auto [nx, ny, nz] = grid.dims();
  const double res = grid.resolution();
  const double sentinel =
      res * std::sqrt(static_cast<double>(nx) * nx + static_cast<double>(ny) * ny + static_cast<double>(nz) * nz);

  std::vector<double> d(grid.size());
  const auto& occ = grid.occupancy();
  bool any = false;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = occ[i] ? 0.0 : kInf;
    any = any || occ[i];
  }
  if (!any) {
    std::fill(d.begin(), d.end(), sentinel);
    return DistanceField(grid.origin(), res, grid.dims(), std::move(d), sentinel);
  }

  LineTransform line(std::max({nx, ny, nz}));
  const std::ptrdiff_t sx = 1, sy = nx, sz = static_cast<std::ptrdiff_t>(nx) * ny;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j) line.run(d.data() + k * sz + j * sy, nx, sx);
  for (int k = 0; k < nz; ++k)
    for (int i = 0; i < nx; ++i) line.run(d.data() + k * sz + i, ny, sy);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) line.run(d.data() + j * sy + i, nz, sz);

  for (double& v : d) v = std::sqrt(v) * res;
  return DistanceField(grid.origin(), res, grid.dims(), std::move(d), sentinel);
}

}  // namespace vischase
