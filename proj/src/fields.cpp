#include "vischase/fields.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vischase/error.hpp"

namespace vischase {

namespace {

void require_inside(const DistanceField& field, const Vec3& x, const char* stage) {
  if (!field.contains(x)) {
    std::ostringstream msg;
    msg << "point (" << x.x() << ", " << x.y() << ", " << x.z() << ") is outside the field";
    throw Error(ErrorKind::OutOfRange, stage, msg.str());
  }
}

void require_step(double step, const char* stage) {
  if (!(step > 0) || !std::isfinite(step))
    throw Error(ErrorKind::InvalidInput, stage, "sampling step must be positive");
}

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

double kernel_min(const DistanceField& field, const Vec3& a, const Vec3& b, double step) {
  const int count = sample_count((b - a).norm(), step);
  // Orient the segment canonically so (a, b) and (b, a) share one sample set.
  const bool swap = lex_less(b, a);
  const Vec3& from = swap ? b : a;
  const Vec3& to = swap ? a : b;
  const simd::FieldView view = field.view();
  return simd::segment_min(view, from.data(), to.data(), count);
}

}  // namespace

// ---------------------------------------------------------------------------
// DistanceField

DistanceField::DistanceField(const Vec3& origin, double resolution, const Index3& dims,
                             std::vector<double> values, double sentinel)
    : origin_(origin), resolution_(resolution), dims_(dims), values_(std::move(values)), sentinel_(sentinel) {
  if (values_.size() != static_cast<std::size_t>(dims[0]) * dims[1] * dims[2])
    throw Error(ErrorKind::InvalidInput, "fields", "value count does not match grid dimensions");
}

double DistanceField::value(const Index3& idx) const {
  for (int a = 0; a < 3; ++a)
    if (idx[a] < 0 || idx[a] >= dims_[a]) throw Error(ErrorKind::OutOfRange, "fields", "voxel index outside the field");
  return values_[(static_cast<std::size_t>(idx[2]) * dims_[1] + idx[1]) * dims_[0] + idx[0]];
}

Vec3 DistanceField::center(const Index3& idx) const {
  return origin_ + resolution_ * Vec3(idx[0] + 0.5, idx[1] + 0.5, idx[2] + 0.5);
}

Vec3 DistanceField::upper() const { return origin_ + resolution_ * Vec3(dims_[0], dims_[1], dims_[2]); }

bool DistanceField::contains(const Vec3& x) const {
  const Vec3 hi = upper();
  return (x.array() >= origin_.array()).all() && (x.array() <= hi.array()).all();
}

simd::FieldView DistanceField::view() const {
  simd::FieldView v;
  v.values = values_.data();
  v.nx = dims_[0];
  v.ny = dims_[1];
  v.nz = dims_[2];
  v.origin[0] = origin_.x();
  v.origin[1] = origin_.y();
  v.origin[2] = origin_.z();
  v.inv_res = 1.0 / resolution_;
  return v;
}

double DistanceField::phi(const Vec3& x) const {
  require_inside(*this, x, "phi");
  return simd::trilinear(view(), x.x(), x.y(), x.z());
}

// ---------------------------------------------------------------------------
// Segment queries

int sample_count(double length, double step) {
  if (!(length > 0)) return 1;
  return static_cast<int>(std::ceil(length / step)) + 1;
}

double segment_min_phi(const DistanceField& field, const Vec3& a, const Vec3& b, double step) {
  require_step(step, "segment");
  require_inside(field, a, "segment");
  require_inside(field, b, "segment");
  return kernel_min(field, a, b, step);
}

double psi(const DistanceField& field, const VisibilityQuery& q) {
  require_step(q.step, "psi");
  require_inside(field, q.x, "psi");
  require_inside(field, q.x_p, "psi");
  return kernel_min(field, q.x, q.x_p, q.step);
}

bool is_visible(const DistanceField& field, const Vec3& x, const Vec3& x_p, double step) {
  return psi(field, {x, x_p, step}) > 0.0;
}

double line_integral_psi(const DistanceField& field, const Vec3& a, const Vec3& b, const Vec3& x_p,
                         double step) {
  require_step(step, "visibility_integral");
  require_inside(field, a, "visibility_integral");
  require_inside(field, b, "visibility_integral");
  require_inside(field, x_p, "visibility_integral");

  const double length = (b - a).norm();
  if (!(length > 0)) return std::max(kernel_min(field, a, x_p, step), 0.0) * field.resolution();

  const int count = sample_count(length, step);
  double sum = 0.0;
  double p[3];
  for (int i = 0; i < count; ++i) {
    simd::segment_point(a.data(), b.data(), i, count, p);
    const double value = std::max(kernel_min(field, Vec3(p[0], p[1], p[2]), x_p, step), 0.0);
    sum += (i == 0 || i == count - 1) ? 0.5 * value : value;
  }
  return sum * (length / (count - 1));
}

double inverse_geometric_mean(double integral_prev, double integral_next) {
  if (!(integral_prev > 0) || !(integral_next > 0)) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(integral_prev * integral_next);
}

TransitionVisibility transitional_visibility(const DistanceField& field, const Vec3& x_prev,
                                             const Vec3& x_next, const Vec3& x_p_prev,
                                             const Vec3& x_p_next, double step) {
  TransitionVisibility out;
  out.integral_prev = line_integral_psi(field, x_prev, x_next, x_p_prev, step);
  out.integral_next = line_integral_psi(field, x_prev, x_next, x_p_next, step);
  out.cost = inverse_geometric_mean(out.integral_prev, out.integral_next);
  return out;
}

}  // namespace vischase
