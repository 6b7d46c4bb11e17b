#include <doctest.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "softmax_kit/errors.hpp"
#include "softmax_kit/kernels.hpp"
#include "support/oracle.hpp"

using namespace softmax_kit;

namespace {

Matrix2D from_rows(std::size_t cols, std::initializer_list<float> values) {
  Matrix2D m(values.size() / cols, cols);
  std::copy(values.begin(), values.end(), m.data().begin());
  return m;
}

Matrix2D random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, float lo = -5,
                       float hi = 5) {
  Matrix2D m(rows, cols);
  const auto v = oracle::uniform(m.size(), lo, hi, seed);
  std::copy(v.begin(), v.end(), m.data().begin());
  return m;
}

}  // namespace

TEST_CASE("variant names round-trip") {
  for (KernelVariant v : kAllVariants) CHECK(parse_variant(variant_name(v)) == v);
  CHECK_FALSE(parse_variant("reference").has_value());
  CHECK(uses_exact_exp(KernelVariant::FullVectorized));
  CHECK_FALSE(uses_exact_exp(KernelVariant::FullVectorizedApproxExp));
}

TEST_CASE("row_max_scalar") {
  CHECK(row_max_scalar(std::vector<float>{3, 1, 2}) == 3.0f);
  CHECK(row_max_scalar(std::vector<float>{-5}) == -5.0f);
  const auto v = oracle::uniform(1024, -10, 10, 42);
  CHECK(row_max_scalar(v) == oracle::sorted_max(v));
  CHECK_THROWS_AS(row_max_scalar({}), ArgumentError);
}

TEST_CASE("subtract_broadcast") {
  CHECK(subtract_broadcast(std::vector<float>{1, 2, 3}, 3) == std::vector<float>{-2, -1, 0});
  CHECK(subtract_broadcast(std::vector<float>{5}, 5) == std::vector<float>{0});
  const auto v = oracle::uniform(777, -3, 3, 1);
  const auto s = subtract_broadcast(v, row_max_scalar(v));
  CHECK(*std::max_element(s.begin(), s.end()) == 0.0f);
  CHECK(std::all_of(s.begin(), s.end(), [](float x) { return x <= 0; }));

  std::vector<float> inplace = v;
  subtract_broadcast(inplace, 1.5f, inplace);
  for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(inplace[i] == v[i] - 1.5f);
  std::vector<float> shorter(3);
  CHECK_THROWS_AS(subtract_broadcast(v, 0, shorter), ArgumentError);
}

TEST_CASE("value_clip") {
  CHECK(value_clip(-100.0f) == -64.0f);
  CHECK(value_clip(-1.0f) == -1.0f);
  CHECK(value_clip(0.0f) == 0.0f);
  // The floor must survive exp in single precision.
  std::vector<float> e{kClipFloor};
  exp_batch(e);
  CHECK(e[0] > 0.0f);
}

TEST_CASE("exp_batch") {
  std::vector<float> ones{0, 0, 0};
  exp_batch(ones);
  CHECK(ones == std::vector<float>{1, 1, 1});

  std::vector<float> v{-64.0f, std::log(2.0f), -87.0f, -88.0f, -100.0f};
  exp_batch(v);
  CHECK(v[0] > 0.0f);
  CHECK(oracle::rel_err(v[0], std::exp(-64.0L)) < 1.2e-7L);
  CHECK(std::fabs(v[1] - 2.0f) <= std::nextafter(2.0f, 3.0f) - 2.0f);
  CHECK(v[2] >= FLT_MIN);
  // Results that would be subnormal are flushed.
  CHECK(v[3] == 0.0f);
  CHECK(v[4] == 0.0f);
  CHECK_FALSE(std::signbit(v[4]));
}

TEST_CASE("row_sum_scalar") {
  CHECK(row_sum_scalar(std::vector<float>{1, 1, 1, 1}) == 4.0f);
  CHECK(row_sum_scalar(std::vector<float>(8, 0.25f)) == 2.0f);
  const auto v = oracle::uniform(1000, 0, 1, 9);
  CHECK(oracle::rel_err(row_sum_scalar(v), oracle::kahan_sum(v)) <= 1e-6L);
  CHECK_THROWS_AS(row_sum_scalar({}), ArgumentError);
}

TEST_CASE("scale_reciprocal") {
  std::vector<float> a{2, 4, 6};
  scale_reciprocal(a, 2);
  CHECK(a == std::vector<float>{1, 2, 3});
  std::vector<float> one{1};
  scale_reciprocal(one, 1);
  CHECK(one[0] == 1.0f);

  auto e = oracle::uniform(300, -8, 0, 4);
  exp_batch(e);
  scale_reciprocal(e, row_sum_scalar(e));
  CHECK(std::fabs(oracle::kahan_sum(e) - 1) <= 1e-6L);

  CHECK_THROWS_AS(scale_reciprocal(a, 0), NumericDomainError);
  CHECK_THROWS_AS(scale_reciprocal(a, -1), NumericDomainError);
  CHECK_THROWS_AS(scale_reciprocal(a, std::numeric_limits<float>::infinity()),
                  NumericDomainError);
  CHECK_THROWS_AS(scale_reciprocal(a, std::numeric_limits<float>::quiet_NaN()),
                  NumericDomainError);
}

TEST_CASE("softmax small rows") {
  for (KernelVariant v : kAllVariants) {
    CAPTURE(variant_name(v));
    const Matrix2D flat = softmax(from_rows(4, {0, 0, 0, 0}), v);
    for (float x : flat.data()) CHECK(x == doctest::Approx(0.25f).epsilon(1e-7));

    const Matrix2D r = softmax(from_rows(3, {1, 2, 3}), v);
    const double want[] = {0.09003057317038046, 0.24472847105479767, 0.6652409557748219};
    const double tol = uses_exact_exp(v) ? 1e-6 : 1e-5;
    for (int c = 0; c < 3; ++c) CHECK(std::fabs(r(0, c) - want[c]) / want[c] <= tol);

    const Matrix2D single = softmax(from_rows(1, {3.5f, -80.0f, 0.0f}), v);
    for (float x : single.data()) CHECK(x == 1.0f);
  }
}

TEST_CASE("softmax agrees with the oracle and across variants") {
  for (std::size_t cols : {1, 2, 3, 7, 8, 9, 15, 16, 17, 63, 64, 100, 511, 512, 1000, 1024}) {
    const Matrix2D in = random_matrix(24, cols, cols);
    const Matrix2D ref = softmax(in, KernelVariant::ReferenceInference);
    for (KernelVariant v : kAllVariants) {
      CAPTURE(cols);
      CAPTURE(variant_name(v));
      const double tol = uses_exact_exp(v) ? 1e-6 : 1e-5;
      const Matrix2D out = softmax(in, v);
      for (std::size_t n = 0; n < in.rows(); ++n) {
        const auto want = oracle::softmax(in.row(n));
        const auto got = out.row(n);
        long double sum = 0;
        for (std::size_t c = 0; c < cols; ++c) {
          sum += got[c];
          REQUIRE(got[c] > 0.0f);
          REQUIRE(got[c] <= 1.0f);
          REQUIRE(oracle::rel_err(got[c], want[c]) <= tol);
          REQUIRE(oracle::rel_err(got[c], ref(n, c)) <= tol + 1e-6);
        }
        REQUIRE(std::fabs(sum - 1) <= 1e-5L);
      }
    }
  }
}

TEST_CASE("softmax preserves order") {
  const Matrix2D in = random_matrix(16, 200, 77);
  for (KernelVariant v : kAllVariants) {
    const Matrix2D out = softmax(in, v);
    for (std::size_t n = 0; n < in.rows(); ++n) {
      std::vector<std::size_t> idx(in.cols());
      std::iota(idx.begin(), idx.end(), 0);
      const auto z = in.row(n);
      const auto y = out.row(n);
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return z[a] < z[b]; });
      for (std::size_t i = 1; i < idx.size(); ++i) REQUIRE(y[idx[i - 1]] <= y[idx[i]]);
    }
  }
}

TEST_CASE("clip distinguishes the reference variants") {
  Matrix2D in(1, 5);
  const float row[] = {3.0f, 1.0f, -97.0f, 2.5f, -30.0f};
  std::copy(std::begin(row), std::end(row), in.data().begin());
  const Matrix2D clipped = softmax(in, KernelVariant::ReferenceClipped);
  const Matrix2D plain = softmax(in, KernelVariant::ReferenceInference);
  CHECK(clipped(0, 2) > 0.0f);
  CHECK(plain(0, 2) == 0.0f);
  // Elsewhere the two agree closely.
  for (int c : {0, 1, 3, 4}) CHECK(std::fabs(clipped(0, c) - plain(0, c)) <= 1e-7f);
}

TEST_CASE("softmax is bitwise deterministic") {
  const Matrix2D in = random_matrix(8, 333, 12);
  for (KernelVariant v : kAllVariants) CHECK(softmax(in, v).bitwise_equal(softmax(in, v)));
}

TEST_CASE("softmax rejects non-finite input with the row index") {
  Matrix2D in = random_matrix(4, 10, 3);
  in(2, 7) = std::numeric_limits<float>::quiet_NaN();
  for (KernelVariant v : kAllVariants) {
    try {
      (void)softmax(in, v);
      FAIL("expected NumericDomainError");
    } catch (const NumericDomainError& e) {
      CHECK(e.row() == 2u);
    }
  }
  in(2, 7) = 0;
  in(3, 0) = -std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS((void)softmax(in, KernelVariant::FullVectorized), NumericDomainError);
}

TEST_CASE("softmax_into and softmax_row") {
  const Matrix2D in = random_matrix(3, 50, 8);
  Matrix2D wrong(3, 49);
  CHECK_THROWS_AS(softmax_into(in, wrong, KernelVariant::MklStyleScalar), ArgumentError);

  for (KernelVariant v : kAllVariants) {
    const Matrix2D whole = softmax(in, v);
    std::vector<float> out(50);
    const RowStats st = softmax_row(in.row(1), out, v);
    CHECK(st.max == oracle::sorted_max(in.row(1)));
    CHECK(st.sum >= 1.0f);
    for (std::size_t c = 0; c < 50; ++c) REQUIRE(out[c] == whole(1, c));
  }
  std::vector<float> out(2);
  CHECK_THROWS_AS(softmax_row({}, {}, KernelVariant::ReferenceClipped), ArgumentError);
  CHECK_THROWS_AS(softmax_row(in.row(0), out, KernelVariant::ReferenceClipped), ArgumentError);
}

TEST_CASE("instrumented entry marks phases in order") {
  const Matrix2D in = random_matrix(4, 256, 2);
  Matrix2D out(4, 256);
  static std::uint64_t counter;
  counter = 0;
  const TickSource tick = []() noexcept { return ++counter; };
  for (KernelVariant v : kAllVariants) {
    const PhaseMarks m = softmax_into_unchecked(in, out, v, tick);
    CHECK(m.begin < m.max_sub_end);
    CHECK(m.max_sub_end < m.exp_end);
    CHECK(m.exp_end < m.sum_scale_end);
    CHECK(out.bitwise_equal(softmax(in, v)));
  }
}

TEST_CASE("fault hook overflows without the shift") {
  Matrix2D in(1, 4);
  const float row[] = {100.0f, 99.0f, 0.0f, 1.0f};
  std::copy(std::begin(row), std::end(row), in.data().begin());
  Matrix2D out(1, 4);
  testing::softmax_into_without_shift(in, out, KernelVariant::FullVectorized);
  CHECK_FALSE(std::all_of(out.data().begin(), out.data().end(),
                          [](float x) { return std::isfinite(x); }));
}
