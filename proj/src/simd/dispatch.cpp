#include <cstdlib>
#include <cstring>

#include "vischase/simd/kernels.hpp"

namespace vischase::simd {

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa detect() {
  const char* forced = std::getenv("VISCHASE_SIMD");
  if (forced && std::strcmp(forced, "scalar") == 0) return Isa::Scalar;
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

SegmentMinFn segment_min_for(Isa isa) {
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return &segment_min_avx2;
#endif
  (void)isa;
  return &segment_min_scalar;
}

double segment_min(const FieldView& f, const double* a, const double* b, int count) {
  static const SegmentMinFn fn = segment_min_for(active_isa());
  return fn(f, a, b, count);
}

}  // namespace vischase::simd
