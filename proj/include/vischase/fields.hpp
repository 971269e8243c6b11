#pragma once

#include <vector>

#include "vischase/simd/kernels.hpp"
#include "vischase/world.hpp"

namespace vischase {

/// Euclidean distance (m) from every voxel center to the nearest occupied
/// voxel center. Occupied voxels hold 0; a grid without obstacles holds the
/// sentinel (its bounding-box diagonal) everywhere.
class DistanceField {
 public:
  DistanceField(const Vec3& origin, double resolution, const Index3& dims,
                std::vector<double> values, double sentinel);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const Index3& dims() const { return dims_; }
  double sentinel() const { return sentinel_; }
  const std::vector<double>& values() const { return values_; }

  double value(const Index3& idx) const;
  Vec3 center(const Index3& idx) const;
  Vec3 upper() const;
  bool contains(const Vec3& x) const;

  /// Trilinear interpolation of the voxel values at x; throws OutOfRange
  /// outside the grid box.
  double phi(const Vec3& x) const;

  /// Default segment sampling step: half a voxel.
  double default_step() const { return 0.5 * resolution_; }

  simd::FieldView view() const;

 private:
  Vec3 origin_;
  double resolution_;
  Index3 dims_;
  std::vector<double> values_;
  double sentinel_;
};

/// Exact Euclidean distance transform (separable lower-envelope method).
DistanceField compute_edf(const VoxelGrid& grid);

/// Minimum of phi over the closed segment a-b, sampled at spacing <= step
/// with both endpoints included. The sample set depends only on the
/// unordered pair {a, b}.
double segment_min_phi(const DistanceField& field, const Vec3& a, const Vec3& b, double step);

struct VisibilityQuery {
  Vec3 x;    // viewpoint
  Vec3 x_p;  // target
  double step;
};

/// Visibility score: min of phi along the sight line x -> x_p.
double psi(const DistanceField& field, const VisibilityQuery& q);
inline double psi(const DistanceField& field, const Vec3& x, const Vec3& x_p) {
  return psi(field, {x, x_p, field.default_step()});
}

bool is_visible(const DistanceField& field, const Vec3& x, const Vec3& x_p, double step);
inline bool is_visible(const DistanceField& field, const Vec3& x, const Vec3& x_p) {
  return is_visible(field, x, x_p, field.default_step());
}

/// Trapezoidal integral of max(psi(s; x_p), 0) over s on L(a, b). A
/// zero-length segment contributes max(psi(a; x_p), 0) * resolution.
double line_integral_psi(const DistanceField& field, const Vec3& a, const Vec3& b, const Vec3& x_p,
                         double step);

struct TransitionVisibility {
  double integral_prev = 0.0;  // against the earlier target sample
  double integral_next = 0.0;
  double cost = 0.0;           // +inf when either integral is zero
};

/// Inverse geometric mean of two line integrals; +inf if either is zero.
double inverse_geometric_mean(double integral_prev, double integral_next);

TransitionVisibility transitional_visibility(const DistanceField& field, const Vec3& x_prev,
                                             const Vec3& x_next, const Vec3& x_p_prev,
                                             const Vec3& x_p_next, double step);

inline double transitional_visibility_cost(const DistanceField& field, const Vec3& x_prev,
                                           const Vec3& x_next, const Vec3& x_p_prev,
                                           const Vec3& x_p_next, double step) {
  return transitional_visibility(field, x_prev, x_next, x_p_prev, x_p_next, step).cost;
}

/// Number of equispaced samples giving spacing <= step over a segment of
/// the given length (1 for a degenerate segment).
int sample_count(double length, double step);

}  // namespace vischase
