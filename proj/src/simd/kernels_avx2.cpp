#include "vischase/simd/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <limits>

#define VISCHASE_AVX2 __attribute__((target("avx2")))

namespace vischase::simd {

namespace {

struct AxisLanes {
  __m256d base;  // floor index as double
  __m256d frac;
};

VISCHASE_AVX2 inline AxisLanes axis_lanes(__m256d p, double origin, double inv, int n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d u = _mm256_sub_pd(_mm256_mul_pd(_mm256_sub_pd(p, _mm256_set1_pd(origin)), _mm256_set1_pd(inv)),
                            _mm256_set1_pd(0.5));
  const __m256d r = _mm256_round_pd(u, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d dist = _mm256_andnot_pd(sign, _mm256_sub_pd(u, r));
  u = _mm256_blendv_pd(u, r, _mm256_cmp_pd(dist, _mm256_set1_pd(1e-9), _CMP_LT_OQ));
  const double hi = static_cast<double>(n - 1);
  u = _mm256_min_pd(_mm256_max_pd(u, _mm256_setzero_pd()), _mm256_set1_pd(hi));
  __m256d fl = _mm256_floor_pd(u);
  if (n > 1) fl = _mm256_min_pd(fl, _mm256_set1_pd(hi - 1.0));
  return {fl, _mm256_sub_pd(u, fl)};
}

VISCHASE_AVX2 inline __m256d lerp(__m256d a, __m256d b, __m256d t) {
  const __m256d s = _mm256_sub_pd(_mm256_set1_pd(1.0), t);
  return _mm256_add_pd(_mm256_mul_pd(s, a), _mm256_mul_pd(t, b));
}

VISCHASE_AVX2 inline __m256d gather(const double* base, __m256i idx, std::ptrdiff_t offset) {
  return _mm256_i64gather_pd(base, _mm256_add_epi64(idx, _mm256_set1_epi64x(offset)), 8);
}

VISCHASE_AVX2 inline __m256d trilinear4(const FieldView& f, __m256d x, __m256d y, __m256d z) {
  const AxisLanes ax = axis_lanes(x, f.origin[0], f.inv_res, f.nx);
  const AxisLanes ay = axis_lanes(y, f.origin[1], f.inv_res, f.ny);
  const AxisLanes az = axis_lanes(z, f.origin[2], f.inv_res, f.nz);

  // Linear index (k * ny + j) * nx + i, exact in double for any grid that fits in memory.
  const __m256d lin = _mm256_add_pd(
      _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(az.base, _mm256_set1_pd(f.ny)), ay.base), _mm256_set1_pd(f.nx)),
      ax.base);
  const __m256i idx = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(lin));

  const std::ptrdiff_t sx = f.nx > 1 ? 1 : 0;
  const std::ptrdiff_t sy = f.ny > 1 ? f.nx : 0;
  const std::ptrdiff_t sz = f.nz > 1 ? static_cast<std::ptrdiff_t>(f.nx) * f.ny : 0;

  const __m256d c00 = lerp(gather(f.values, idx, 0), gather(f.values, idx, sx), ax.frac);
  const __m256d c10 = lerp(gather(f.values, idx, sy), gather(f.values, idx, sy + sx), ax.frac);
  const __m256d c01 = lerp(gather(f.values, idx, sz), gather(f.values, idx, sz + sx), ax.frac);
  const __m256d c11 = lerp(gather(f.values, idx, sz + sy), gather(f.values, idx, sz + sy + sx), ax.frac);
  const __m256d c0 = lerp(c00, c10, ay.frac);
  const __m256d c1 = lerp(c01, c11, ay.frac);
  return lerp(c0, c1, az.frac);
}

}  // namespace

VISCHASE_AVX2 double segment_min_avx2(const FieldView& f, const double* a, const double* b, int count) {
  double best = std::numeric_limits<double>::infinity();
  int i = 0;
  if (count >= 4) {
    const __m256d denom = _mm256_set1_pd(static_cast<double>(count - 1));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d ax = _mm256_set1_pd(a[0]), ay = _mm256_set1_pd(a[1]), az = _mm256_set1_pd(a[2]);
    const __m256d bx = _mm256_set1_pd(b[0]), by = _mm256_set1_pd(b[1]), bz = _mm256_set1_pd(b[2]);
    __m256d vbest = _mm256_set1_pd(best);
    __m256d lane = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
    const __m256d four = _mm256_set1_pd(4.0);
    for (; i + 4 <= count; i += 4) {
      const __m256d t = _mm256_div_pd(lane, denom);
      const __m256d s = _mm256_sub_pd(one, t);
      const __m256d px = _mm256_add_pd(_mm256_mul_pd(s, ax), _mm256_mul_pd(t, bx));
      const __m256d py = _mm256_add_pd(_mm256_mul_pd(s, ay), _mm256_mul_pd(t, by));
      const __m256d pz = _mm256_add_pd(_mm256_mul_pd(s, az), _mm256_mul_pd(t, bz));
      vbest = _mm256_min_pd(vbest, trilinear4(f, px, py, pz));
      lane = _mm256_add_pd(lane, four);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vbest);
    best = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  }
  double p[3];
  for (; i < count; ++i) {
    segment_point(a, b, i, count, p);
    best = std::min(best, trilinear(f, p[0], p[1], p[2]));
  }
  return best;
}

}  // namespace vischase::simd

#endif
