#include <doctest.h>

#include <cstdint>
#include <limits>
#include <random>

#include "softmax_kit/errors.hpp"
#include "softmax_kit/tensor.hpp"

using namespace softmax_kit;

namespace {

bool aligned(const Matrix2D& m) {
  return reinterpret_cast<std::uintptr_t>(m.data().data()) % kMatrixAlignment == 0;
}

}  // namespace

TEST_CASE("alloc_matrix zero-initializes") {
  const Matrix2D one = alloc_matrix(1, 1);
  CHECK(one.size() == 1);
  CHECK(one(0, 0) == 0.0f);

  const Matrix2D big = alloc_matrix(128, 1000);
  CHECK(big.size() == 128000);
  CHECK(aligned(big));
  for (float x : big.data()) REQUIRE(x == 0.0f);
}

TEST_CASE("alloc_matrix rejects bad shapes") {
  CHECK_THROWS_AS(alloc_matrix(3, 0), ArgumentError);
  CHECK_THROWS_AS(alloc_matrix(0, 3), ArgumentError);
  const auto huge = std::numeric_limits<std::size_t>::max() / 2;
  CHECK_THROWS_AS(alloc_matrix(huge, 4), ArgumentError);
  // Does not overflow but cannot be satisfied.
  CHECK_THROWS_AS(alloc_matrix(std::size_t{1} << 40, std::size_t{1} << 20), ResourceError);
}

TEST_CASE("alignment holds across random shapes") {
  std::mt19937 gen(5);
  std::uniform_int_distribution<std::size_t> d(1, 67);
  for (int i = 0; i < 10000; ++i) {
    const Matrix2D m = alloc_matrix(d(gen), d(gen));
    REQUIRE(aligned(m));
  }
}

TEST_CASE("row views index row-major storage") {
  Matrix2D m = alloc_matrix(3, 5);
  fill_uniform(m, {11, -1.0f, 1.0f});
  for (std::size_t n = 0; n < m.rows(); ++n) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      CHECK(m.row(n)[c] == m.data()[n * m.cols() + c]);
      CHECK(m(n, c) == m.data()[n * m.cols() + c]);
    }
  }
}

TEST_CASE("copies are deep") {
  Matrix2D a = alloc_matrix(2, 3);
  fill_uniform(a, {1});
  Matrix2D b = a;
  CHECK(b.bitwise_equal(a));
  CHECK(b.data().data() != a.data().data());
  b(0, 0) += 1.0f;
  CHECK_FALSE(b.bitwise_equal(a));
  CHECK(aligned(b));
}

TEST_CASE("fill_uniform is deterministic") {
  Matrix2D a = alloc_matrix(2, 4), b = alloc_matrix(2, 4), c = alloc_matrix(2, 4);
  fill_uniform(a, {7, 0.0f, 1.0f});
  fill_uniform(b, {7, 0.0f, 1.0f});
  fill_uniform(c, {8, 0.0f, 1.0f});
  CHECK(a.bitwise_equal(b));
  CHECK_FALSE(a.bitwise_equal(c));
}

TEST_CASE("fill_uniform stays inside the open range") {
  Matrix2D m = alloc_matrix(64, 1000);
  fill_uniform(m, {3, -10.0f, 10.0f});
  for (float x : m.data()) REQUIRE((x > -10.0f && x < 10.0f));

  // A range only a few floats wide still excludes the endpoints.
  const float lo = 1.0f, hi = std::nextafter(std::nextafter(1.0f, 2.0f), 2.0f);
  fill_uniform(m, {3, lo, hi});
  for (float x : m.data()) REQUIRE((x > lo && x < hi));
}

TEST_CASE("fill_uniform uses the standard mt19937_64 stream") {
  // The standard pins the 10000th output for the default seed 5489.
  constexpr std::uint64_t k10000th = 9981545732273789042ull;
  Matrix2D m = alloc_matrix(1, 10000);
  fill_uniform(m, {5489, 0.0f, 1.0f});
  const double u = (static_cast<double>(k10000th >> 40) + 0.5) / 16777216.0;
  CHECK(m(0, 9999) == static_cast<float>(u));
}

TEST_CASE("fill_uniform rejects bad ranges") {
  Matrix2D m = alloc_matrix(1, 4);
  CHECK_THROWS_AS(fill_uniform(m, {0, 1.0f, 1.0f}), ArgumentError);
  CHECK_THROWS_AS(fill_uniform(m, {0, 2.0f, 1.0f}), ArgumentError);
  CHECK_THROWS_AS(fill_uniform(m, {0, 0.0f, std::numeric_limits<float>::infinity()}),
                  ArgumentError);
  CHECK_THROWS_AS(fill_uniform(m, {0, 1.0f, std::nextafter(1.0f, 2.0f)}), ArgumentError);
}
