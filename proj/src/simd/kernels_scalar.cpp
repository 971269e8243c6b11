#include "vischase/simd/kernels.hpp"

#include <limits>

namespace vischase::simd {

double segment_min_scalar(const FieldView& f, const double* a, const double* b, int count) {
  double best = std::numeric_limits<double>::infinity();
  double p[3];
  for (int i = 0; i < count; ++i) {
    segment_point(a, b, i, count, p);
    best = std::min(best, trilinear(f, p[0], p[1], p[2]));
  }
  return best;
}

}  // namespace vischase::simd
