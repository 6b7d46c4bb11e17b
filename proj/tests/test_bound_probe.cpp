#include <doctest.h>

#include "softmax_kit/bound_probe.hpp"
#include "softmax_kit/errors.hpp"

using namespace softmax_kit;

TEST_CASE("classify threshold") {
  CHECK(classify(1.0) == BoundVerdict::MemoryBoundLikely);
  CHECK(classify(1.3) == BoundVerdict::MemoryBoundLikely);
  CHECK(classify(1.31) == BoundVerdict::ComputeBoundLikely);
  CHECK(verdict_name(BoundVerdict::MemoryBoundLikely) == "MemoryBoundLikely");
  CHECK(verdict_name(BoundVerdict::ComputeBoundLikely) == "ComputeBoundLikely");
}

TEST_CASE("copy_baseline") {
  Matrix2D tiny(1, 1);
  CHECK(copy_baseline(tiny, 3, 0) >= 0);
  CHECK_THROWS_AS(copy_baseline(tiny, 2), ArgumentError);
}

TEST_CASE("copy time scales with size") {
  // Large enough that per-call overhead is small, but both sizes are timed
  // the same way so cache residency matches.
  Matrix2D small(512, 1024), large(1024, 1024);
  fill_uniform(small, {1});
  fill_uniform(large, {1});
  const double a = static_cast<double>(copy_baseline(small, 41));
  const double b = static_cast<double>(copy_baseline(large, 41));
  MESSAGE("copy ticks: ", a, " -> ", b);
  CHECK(b >= 1.5 * a);
  CHECK(b <= 3.0 * a);
}

TEST_CASE("self-probe is memory bound") {
  Matrix2D m(128, 1000);
  fill_uniform(m, {5});
  const auto r = probe(m, std::nullopt, 31);
  MESSAGE("self-probe ratio ", r.ratio);
  CHECK(r.ratio >= 0.8);
  CHECK(r.ratio <= 1.25);
  CHECK(r.verdict == BoundVerdict::MemoryBoundLikely);
}

TEST_CASE("reference softmax is compute bound and optimization lowers the ratio") {
  for (std::size_t batch : {1, 8, 32, 128}) {
    Matrix2D m(batch, 1000);
    fill_uniform(m, {42});
    const auto ref = probe(m, KernelVariant::ReferenceClipped, 11);
    const auto opt = probe(m, KernelVariant::FullVectorized, 11);
    CAPTURE(batch);
    CHECK(ref.ratio > 0);
    CHECK(ref.verdict == BoundVerdict::ComputeBoundLikely);
    CHECK(ref.ratio >= opt.ratio);
  }
  Matrix2D m(2, 2);
  CHECK_THROWS_AS(probe(m, KernelVariant::FullVectorized, 2), ArgumentError);
}
