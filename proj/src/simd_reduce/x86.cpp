// Native x86 lane kernels: SSE2 (W=4), AVX2 (W=8), AVX-512F (W=16).
// Every function mirrors the emulation in portable.cpp operation for operation.

#include <cstddef>

#include "simd_reduce/exp_poly.hpp"
#include "simd_reduce/lane_kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))

#include <immintrin.h>

#define SMK_TARGET(isa) __attribute__((target(isa)))

namespace softmax_kit::detail {

namespace {

// ---------------------------------------------------------------- W = 4

SMK_TARGET("sse2") float max_w4(const float* a, std::size_t n) {
  __m128 acc = _mm_set1_ps(a[0]);
  const std::size_t main_end = n / 4 * 4;
  std::size_t i = 0;
  for (; i < main_end; i += 4) acc = _mm_max_ps(acc, _mm_loadu_ps(a + i));
  if (n - i >= 2) {
    acc = _mm_max_ps(acc, _mm_setr_ps(a[i], a[i + 1], a[i], a[i + 1]));
    i += 2;
  }
  for (; i < n; ++i) acc = _mm_max_ps(acc, _mm_set1_ps(a[i]));
  acc = _mm_max_ps(acc, _mm_shuffle_ps(acc, acc, _MM_SHUFFLE(0, 1, 2, 3)));
  acc = _mm_max_ps(acc, _mm_shuffle_ps(acc, acc, _MM_SHUFFLE(0, 0, 0, 1)));
  return _mm_cvtss_f32(acc);
}

SMK_TARGET("sse2") float sum_w4(const float* a, std::size_t n) {
  __m128 acc = _mm_setzero_ps();
  const std::size_t main_end = n / 4 * 4;
  std::size_t i = 0;
  for (; i < main_end; i += 4) acc = _mm_add_ps(acc, _mm_loadu_ps(a + i));
  alignas(16) float lanes[4];
  _mm_store_ps(lanes, acc);
  for (; i < n; ++i) lanes[0] += a[i];
  float total = 0.0f;
  for (float l : lanes) total += l;
  return total;
}

SMK_TARGET("sse2") void sub_w4(const float* a, float v, float* out, std::size_t n) {
  const __m128 vv = _mm_set1_ps(v);
  const std::size_t main_end = n / 4 * 4;
  std::size_t i = 0;
  for (; i < main_end; i += 4) _mm_storeu_ps(out + i, _mm_sub_ps(_mm_loadu_ps(a + i), vv));
  for (; i < n; ++i) out[i] = a[i] - v;
}

SMK_TARGET("sse2") __m128 exp_ps_w4(__m128 x) {
  x = _mm_max_ps(x, _mm_set1_ps(kExpClampLow));
  x = _mm_min_ps(x, _mm_set1_ps(kExpClampHigh));
  const __m128 magic = _mm_set1_ps(kRoundMagic);
  __m128 k = _mm_mul_ps(x, _mm_set1_ps(kLog2e));
  k = _mm_add_ps(k, magic);
  k = _mm_sub_ps(k, magic);
  __m128 r = _mm_sub_ps(x, _mm_mul_ps(k, _mm_set1_ps(kLn2Hi)));
  r = _mm_sub_ps(r, _mm_mul_ps(k, _mm_set1_ps(kLn2Lo)));
  const __m128 r2 = _mm_mul_ps(r, r);
  __m128 p = _mm_set1_ps(kExpP0);
  p = _mm_add_ps(_mm_mul_ps(p, r), _mm_set1_ps(kExpP1));
  p = _mm_add_ps(_mm_mul_ps(p, r), _mm_set1_ps(kExpP2));
  p = _mm_add_ps(_mm_mul_ps(p, r), _mm_set1_ps(kExpP3));
  p = _mm_add_ps(_mm_mul_ps(p, r), _mm_set1_ps(kExpP4));
  p = _mm_add_ps(_mm_mul_ps(p, r), _mm_set1_ps(kExpP5));
  p = _mm_add_ps(_mm_mul_ps(p, r2), r);
  p = _mm_add_ps(p, _mm_set1_ps(1.0f));
  const __m128i biased = _mm_add_epi32(_mm_cvtps_epi32(k), _mm_set1_epi32(127));
  const __m128 y = _mm_mul_ps(p, _mm_castsi128_ps(_mm_slli_epi32(biased, 23)));
  return _mm_andnot_ps(_mm_cmplt_ps(y, _mm_set1_ps(kNormalMin)), y);
}

SMK_TARGET("sse2") void exp_w4(const float* a, float* out, std::size_t n) {
  const std::size_t main_end = n / 4 * 4;
  std::size_t i = 0;
  for (; i < main_end; i += 4) _mm_storeu_ps(out + i, exp_ps_w4(_mm_loadu_ps(a + i)));
  for (; i < n; ++i) out[i] = exp_lane(a[i]);
}

// ---------------------------------------------------------------- W = 8

SMK_TARGET("avx2") float max_w8(const float* a, std::size_t n) {
  __m256 acc = _mm256_set1_ps(a[0]);
  const std::size_t main_end = n / 8 * 8;
  std::size_t i = 0;
  for (; i < main_end; i += 8) acc = _mm256_max_ps(acc, _mm256_loadu_ps(a + i));
  if (n - i >= 4) {
    const __m128 half = _mm_loadu_ps(a + i);
    acc = _mm256_max_ps(acc, _mm256_set_m128(half, half));
    i += 4;
  }
  for (; i < n; ++i) acc = _mm256_max_ps(acc, _mm256_set1_ps(a[i]));
  acc = _mm256_max_ps(acc, _mm256_permute2f128_ps(acc, acc, 1));
  acc = _mm256_max_ps(acc, _mm256_permute_ps(acc, 0x1B));
  acc = _mm256_max_ps(acc, _mm256_permute_ps(acc, 0x01));
  return _mm256_cvtss_f32(acc);
}

SMK_TARGET("avx2") float sum_w8(const float* a, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  const std::size_t main_end = n / 8 * 8;
  std::size_t i = 0;
  for (; i < main_end; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(a + i));
  alignas(32) float lanes[8];
  _mm256_store_ps(lanes, acc);
  for (; i < n; ++i) lanes[0] += a[i];
  float total = 0.0f;
  for (float l : lanes) total += l;
  return total;
}

SMK_TARGET("avx2") void sub_w8(const float* a, float v, float* out, std::size_t n) {
  const __m256 vv = _mm256_set1_ps(v);
  const std::size_t main_end = n / 8 * 8;
  std::size_t i = 0;
  for (; i < main_end; i += 8) {
    _mm256_storeu_ps(out + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), vv));
  }
  for (; i < n; ++i) out[i] = a[i] - v;
}

SMK_TARGET("avx2") __m256 exp_ps_w8(__m256 x) {
  x = _mm256_max_ps(x, _mm256_set1_ps(kExpClampLow));
  x = _mm256_min_ps(x, _mm256_set1_ps(kExpClampHigh));
  const __m256 magic = _mm256_set1_ps(kRoundMagic);
  __m256 k = _mm256_mul_ps(x, _mm256_set1_ps(kLog2e));
  k = _mm256_add_ps(k, magic);
  k = _mm256_sub_ps(k, magic);
  __m256 r = _mm256_sub_ps(x, _mm256_mul_ps(k, _mm256_set1_ps(kLn2Hi)));
  r = _mm256_sub_ps(r, _mm256_mul_ps(k, _mm256_set1_ps(kLn2Lo)));
  const __m256 r2 = _mm256_mul_ps(r, r);
  __m256 p = _mm256_set1_ps(kExpP0);
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(kExpP1));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(kExpP2));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(kExpP3));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(kExpP4));
  p = _mm256_add_ps(_mm256_mul_ps(p, r), _mm256_set1_ps(kExpP5));
  p = _mm256_add_ps(_mm256_mul_ps(p, r2), r);
  p = _mm256_add_ps(p, _mm256_set1_ps(1.0f));
  const __m256i biased = _mm256_add_epi32(_mm256_cvtps_epi32(k), _mm256_set1_epi32(127));
  const __m256 y = _mm256_mul_ps(p, _mm256_castsi256_ps(_mm256_slli_epi32(biased, 23)));
  return _mm256_andnot_ps(_mm256_cmp_ps(y, _mm256_set1_ps(kNormalMin), _CMP_LT_OQ), y);
}

SMK_TARGET("avx2") void exp_w8(const float* a, float* out, std::size_t n) {
  const std::size_t main_end = n / 8 * 8;
  std::size_t i = 0;
  for (; i < main_end; i += 8) _mm256_storeu_ps(out + i, exp_ps_w8(_mm256_loadu_ps(a + i)));
  for (; i < n; ++i) out[i] = exp_lane(a[i]);
}

// ---------------------------------------------------------------- W = 16

SMK_TARGET("avx512f") float max_w16(const float* a, std::size_t n) {
  __m512 acc = _mm512_set1_ps(a[0]);
  const std::size_t main_end = n / 16 * 16;
  std::size_t i = 0;
  for (; i < main_end; i += 16) acc = _mm512_max_ps(acc, _mm512_loadu_ps(a + i));
  if (n - i >= 8) {
    const __m512 half = _mm512_castps256_ps512(_mm256_loadu_ps(a + i));
    acc = _mm512_max_ps(acc, _mm512_shuffle_f32x4(half, half, _MM_SHUFFLE(1, 0, 1, 0)));
    i += 8;
  }
  for (; i < n; ++i) acc = _mm512_max_ps(acc, _mm512_set1_ps(a[i]));
  acc = _mm512_max_ps(acc, _mm512_shuffle_f32x4(acc, acc, _MM_SHUFFLE(1, 0, 3, 2)));
  acc = _mm512_max_ps(acc, _mm512_shuffle_f32x4(acc, acc, _MM_SHUFFLE(2, 3, 0, 1)));
  acc = _mm512_max_ps(acc, _mm512_permute_ps(acc, 0x1B));
  acc = _mm512_max_ps(acc, _mm512_permute_ps(acc, 0x01));
  return _mm512_cvtss_f32(acc);
}

SMK_TARGET("avx512f") float sum_w16(const float* a, std::size_t n) {
  __m512 acc = _mm512_setzero_ps();
  const std::size_t main_end = n / 16 * 16;
  std::size_t i = 0;
  for (; i < main_end; i += 16) acc = _mm512_add_ps(acc, _mm512_loadu_ps(a + i));
  alignas(64) float lanes[16];
  _mm512_store_ps(lanes, acc);
  for (; i < n; ++i) lanes[0] += a[i];
  float total = 0.0f;
  for (float l : lanes) total += l;
  return total;
}

SMK_TARGET("avx512f") void sub_w16(const float* a, float v, float* out, std::size_t n) {
  const __m512 vv = _mm512_set1_ps(v);
  const std::size_t main_end = n / 16 * 16;
  std::size_t i = 0;
  for (; i < main_end; i += 16) {
    _mm512_storeu_ps(out + i, _mm512_sub_ps(_mm512_loadu_ps(a + i), vv));
  }
  for (; i < n; ++i) out[i] = a[i] - v;
}

SMK_TARGET("avx512f") __m512 exp_ps_w16(__m512 x) {
  x = _mm512_max_ps(x, _mm512_set1_ps(kExpClampLow));
  x = _mm512_min_ps(x, _mm512_set1_ps(kExpClampHigh));
  const __m512 magic = _mm512_set1_ps(kRoundMagic);
  __m512 k = _mm512_mul_ps(x, _mm512_set1_ps(kLog2e));
  k = _mm512_add_ps(k, magic);
  k = _mm512_sub_ps(k, magic);
  __m512 r = _mm512_sub_ps(x, _mm512_mul_ps(k, _mm512_set1_ps(kLn2Hi)));
  r = _mm512_sub_ps(r, _mm512_mul_ps(k, _mm512_set1_ps(kLn2Lo)));
  const __m512 r2 = _mm512_mul_ps(r, r);
  __m512 p = _mm512_set1_ps(kExpP0);
  p = _mm512_add_ps(_mm512_mul_ps(p, r), _mm512_set1_ps(kExpP1));
  p = _mm512_add_ps(_mm512_mul_ps(p, r), _mm512_set1_ps(kExpP2));
  p = _mm512_add_ps(_mm512_mul_ps(p, r), _mm512_set1_ps(kExpP3));
  p = _mm512_add_ps(_mm512_mul_ps(p, r), _mm512_set1_ps(kExpP4));
  p = _mm512_add_ps(_mm512_mul_ps(p, r), _mm512_set1_ps(kExpP5));
  p = _mm512_add_ps(_mm512_mul_ps(p, r2), r);
  p = _mm512_add_ps(p, _mm512_set1_ps(1.0f));
  const __m512i biased = _mm512_add_epi32(_mm512_cvtps_epi32(k), _mm512_set1_epi32(127));
  const __m512 y = _mm512_mul_ps(p, _mm512_castsi512_ps(_mm512_slli_epi32(biased, 23)));
  const __mmask16 tiny = _mm512_cmp_ps_mask(y, _mm512_set1_ps(kNormalMin), _CMP_LT_OQ);
  return _mm512_mask_mov_ps(y, tiny, _mm512_setzero_ps());
}

SMK_TARGET("avx512f") void exp_w16(const float* a, float* out, std::size_t n) {
  const std::size_t main_end = n / 16 * 16;
  std::size_t i = 0;
  for (; i < main_end; i += 16) _mm512_storeu_ps(out + i, exp_ps_w16(_mm512_loadu_ps(a + i)));
  for (; i < n; ++i) out[i] = exp_lane(a[i]);
}

constexpr LaneKernels kSse2{&max_w4, &sum_w4, &sub_w4, &exp_w4, "sse2"};
constexpr LaneKernels kAvx2{&max_w8, &sum_w8, &sub_w8, &exp_w8, "avx2"};
constexpr LaneKernels kAvx512{&max_w16, &sum_w16, &sub_w16, &exp_w16, "avx512f"};

}  // namespace

const LaneKernels* native_kernels(std::size_t width) noexcept {
  static const bool has_avx2 = __builtin_cpu_supports("avx2");
  static const bool has_avx512 = __builtin_cpu_supports("avx512f");
  switch (width) {
    case 4:
      return &kSse2;
    case 8:
      return has_avx2 ? &kAvx2 : nullptr;
    case 16:
      return has_avx512 ? &kAvx512 : nullptr;
    default:
      return nullptr;
  }
}

}  // namespace softmax_kit::detail

#else

namespace softmax_kit::detail {

const LaneKernels* native_kernels(std::size_t) noexcept { return nullptr; }

}  // namespace softmax_kit::detail

#endif
