#include <doctest.h>

#include <cstring>
#include <random>

#include "oracles.hpp"
#include "vischase/simd/kernels.hpp"

using namespace vischase;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("vector segment-min kernel is bit-identical to the scalar reference") {
  if (!simd::isa_available(simd::Isa::Avx2)) {
    MESSAGE("AVX2 not available on this host; only the scalar path is exercised");
    return;
  }
  const auto scalar = simd::segment_min_for(simd::Isa::Scalar);
  const auto vec = simd::segment_min_for(simd::Isa::Avx2);
  REQUIRE(scalar != vec);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 67);
  for (const Index3 dims : {Index3{17, 13, 9}, Index3{1, 12, 7}, Index3{6, 1, 1}, Index3{2, 2, 2}}) {
    const VoxelGrid g = oracle::random_grid(rng, dims, 0.07, 0.4);
    const DistanceField f = compute_edf(g);
    const simd::FieldView v = f.view();
    const Vec3 span = f.upper() - f.origin();
    for (int n = 0; n < 2000; ++n) {
      // Include points slightly outside the box to exercise clamping, and
      // lattice-aligned points to exercise snapping.
      Vec3 a = f.origin() + span.cwiseProduct(Vec3(u(rng), u(rng), u(rng)) * 1.1 - Vec3::Constant(0.05));
      Vec3 b = f.origin() + span.cwiseProduct(Vec3(u(rng), u(rng), u(rng)) * 1.1 - Vec3::Constant(0.05));
      if (n % 5 == 0) a = f.center({int(u(rng) * dims[0]), int(u(rng) * dims[1]), int(u(rng) * dims[2])});
      const int c = count(rng);
      const double s = scalar(v, a.data(), b.data(), c);
      const double w = vec(v, a.data(), b.data(), c);
      CAPTURE(n);
      CAPTURE(c);
      REQUIRE(same_bits(s, w));
    }
  }
}

TEST_CASE("scalar kernel equals a per-sample trilinear minimum") {
  std::mt19937_64 rng(8);
  const VoxelGrid g = oracle::random_grid(rng, {10, 9, 8}, 0.05, 0.4);
  const DistanceField f = compute_edf(g);
  const simd::FieldView v = f.view();
  const Vec3 a(0.3, 0.9, 1.1), b(3.7, 2.9, 2.4);
  for (int c : {1, 2, 3, 4, 5, 9, 33}) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c; ++i) {
      double p[3];
      simd::segment_point(a.data(), b.data(), i, c, p);
      m = std::min(m, oracle::interp(f, Vec3(p[0], p[1], p[2])));
    }
    CHECK(simd::segment_min_scalar(v, a.data(), b.data(), c) == doctest::Approx(m).epsilon(1e-13));
  }
}

TEST_CASE("dispatcher reports a usable ISA") {
  const simd::Isa isa = simd::active_isa();
  CHECK(simd::isa_available(isa));
  CHECK(std::strlen(simd::to_string(isa)) > 0);
}
