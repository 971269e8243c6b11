#pragma once

// Data-parallel inner loops of the visibility pipeline.
//
// Every kernel has a portable scalar reference in kernels_scalar.cpp and,
// where the host supports it, a vector variant selected at runtime. The
// variants perform the same floating-point operations in the same order, so
// results are bit-identical; tests/test_simd.cpp holds them to that.

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <algorithm>

namespace vischase::simd {

/// Read-only view of a per-voxel scalar field, x-fastest storage.
struct FieldView {
  const double* values = nullptr;
  int nx = 0, ny = 0, nz = 0;
  double origin[3] = {0, 0, 0};
  double inv_res = 1.0;
};

/// Trilinear interpolation of the field at a world point. Coordinates are
/// clamped to the lattice of voxel centers; points within 1e-9 voxels of a
/// lattice plane snap onto it so node values are reproduced exactly.
inline double trilinear(const FieldView& f, double x, double y, double z) {
  auto axis = [](double p, double o, double inv, int n, int& i0, double& fr) {
    double u = (p - o) * inv - 0.5;
    const double r = std::nearbyint(u);
    if (std::fabs(u - r) < 1e-9) u = r;
    const double hi = static_cast<double>(n - 1);
    u = u < 0.0 ? 0.0 : (u > hi ? hi : u);
    double fl = std::floor(u);
    if (n > 1 && fl > hi - 1.0) fl = hi - 1.0;
    i0 = static_cast<int>(fl);
    fr = u - fl;
  };
  int i, j, k;
  double fx, fy, fz;
  axis(x, f.origin[0], f.inv_res, f.nx, i, fx);
  axis(y, f.origin[1], f.inv_res, f.ny, j, fy);
  axis(z, f.origin[2], f.inv_res, f.nz, k, fz);
  const std::ptrdiff_t sx = f.nx > 1 ? 1 : 0;
  const std::ptrdiff_t sy = f.ny > 1 ? f.nx : 0;
  const std::ptrdiff_t sz = f.nz > 1 ? static_cast<std::ptrdiff_t>(f.nx) * f.ny : 0;
  const double* p = f.values + (static_cast<std::ptrdiff_t>(k) * f.ny + j) * f.nx + i;
  const double gx = 1.0 - fx, gy = 1.0 - fy, gz = 1.0 - fz;
  const double c00 = gx * p[0] + fx * p[sx];
  const double c10 = gx * p[sy] + fx * p[sy + sx];
  const double c01 = gx * p[sz] + fx * p[sz + sx];
  const double c11 = gx * p[sz + sy] + fx * p[sz + sy + sx];
  const double c0 = gy * c00 + fy * c10;
  const double c1 = gy * c01 + fy * c11;
  return gz * c0 + fz * c1;
}

/// Sample i of `count` equispaced points on a -> b; endpoints are exact.
inline void segment_point(const double* a, const double* b, int i, int count, double* out) {
  const double t = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
  const double s = 1.0 - t;
  out[0] = s * a[0] + t * b[0];
  out[1] = s * a[1] + t * b[1];
  out[2] = s * a[2] + t * b[2];
}

/// Minimum of the interpolated field over `count` equispaced samples of the
/// segment a -> b (both endpoints included when count >= 2; count == 1
/// evaluates a only).
using SegmentMinFn = double (*)(const FieldView&, const double* a, const double* b, int count);

double segment_min_scalar(const FieldView& f, const double* a, const double* b, int count);
#if defined(__x86_64__) || defined(_M_X64)
double segment_min_avx2(const FieldView& f, const double* a, const double* b, int count);
#endif

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);
bool isa_available(Isa isa);

/// Best ISA supported by the host, unless VISCHASE_SIMD=scalar forces the
/// reference path.
Isa active_isa();

SegmentMinFn segment_min_for(Isa isa);

/// Dispatching entry point.
double segment_min(const FieldView& f, const double* a, const double* b, int count);

}  // namespace vischase::simd
