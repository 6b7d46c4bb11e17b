#pragma once

#include <bit>
#include <cfloat>
#include <cstdint>

namespace softmax_kit::detail {

// Polynomial exponential shared by every lane implementation. Each native
// path must perform exactly these float operations in this order.
//
//   k = rint(x * log2(e))            (ties to even, via the 1.5 * 2^23 trick)
//   r = (x - k * kLn2Hi) - k * kLn2Lo
//   e^r ~= 1 + r + r^2 * P(r),  P of degree 5 (Cephes expf coefficients)
//   e^x = e^r * 2^k               (2^k built in the exponent field)
inline constexpr float kExpClampLow = -88.0f;
inline constexpr float kExpClampHigh = 88.0f;
inline constexpr float kLog2e = 1.44269504088896341f;
inline constexpr float kRoundMagic = 12582912.0f;  // 1.5 * 2^23
inline constexpr float kLn2Hi = 0.693359375f;      // 9 significant bits: k * kLn2Hi is exact
inline constexpr float kLn2Lo = -2.12194440e-4f;   // ln2 - kLn2Hi
inline constexpr float kExpP0 = 1.9875691500e-4f;
inline constexpr float kExpP1 = 1.3981999507e-3f;
inline constexpr float kExpP2 = 8.3334519073e-3f;
inline constexpr float kExpP3 = 4.1665795894e-2f;
inline constexpr float kExpP4 = 1.6666665459e-1f;
inline constexpr float kExpP5 = 5.0000001201e-1f;
inline constexpr float kNormalMin = FLT_MIN;

// Clamps to [-88, 88]; k then stays in [-127, 127] and k = -127 yields a zero
// scale. Results below FLT_MIN are flushed to +0.
inline float exp_lane(float x) {
  x = x > kExpClampLow ? x : kExpClampLow;
  x = x < kExpClampHigh ? x : kExpClampHigh;
  float k = x * kLog2e;
  k = k + kRoundMagic;
  k = k - kRoundMagic;
  float r = k * kLn2Hi;
  r = x - r;
  float t = k * kLn2Lo;
  r = r - t;
  const float r2 = r * r;
  float p = kExpP0;
  p = p * r + kExpP1;
  p = p * r + kExpP2;
  p = p * r + kExpP3;
  p = p * r + kExpP4;
  p = p * r + kExpP5;
  p = p * r2 + r;
  p = p + 1.0f;
  const auto biased = static_cast<std::uint32_t>(static_cast<std::int32_t>(k) + 127);
  const float scale = std::bit_cast<float>(biased << 23);
  const float y = p * scale;
  return y < kNormalMin ? 0.0f : y;
}

}  // namespace softmax_kit::detail
