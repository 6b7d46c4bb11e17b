#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace softmax_kit {

/// Lane geometry of the wide path: W single-precision lanes, W/2 for the
/// half-width tail step. W = 4, 8, 16 model 128-, 256- and 512-bit registers.
class LaneConfig {
 public:
  constexpr LaneConfig() = default;
  /// Throws ArgumentError unless width is 4, 8 or 16.
  explicit LaneConfig(std::size_t width);

  constexpr std::size_t width() const noexcept { return width_; }
  constexpr std::size_t half_width() const noexcept { return width_ / 2; }

 private:
  std::size_t width_ = 8;
};

/**
 * Which implementation of the lane kernels runs.
 *
 * Portable is the definitional W-lane scalar emulation. Native uses the
 * platform vector unit when the CPU supports the requested width and falls
 * back to Portable otherwise; vmax, vsum, vsub_broadcast and vexp produce
 * bit-identical results on both.
 */
enum class LaneBackend { Portable, Native };

/// True when LaneBackend::Native has a platform vector path for this width on
/// the running CPU.
bool native_lanes_available(LaneConfig cfg) noexcept;

/// Human-readable name of the path LaneBackend::Native takes, e.g. "avx2".
std::string_view native_lanes_name(LaneConfig cfg) noexcept;

/**
 * Maximum of a, bitwise equal to row_max_scalar(a).
 *
 * Loop structure: broadcast a[0] into all lanes; lane-wise max over
 * floor(n/W)*W elements; if at least W/2 remain, one half-width load
 * duplicated into both register halves; remaining elements one at a time by
 * broadcast; then a horizontal reduction swapping halves down to one lane.
 * Throws ArgumentError on an empty array.
 */
float vmax(std::span<const float> a, LaneConfig cfg = {},
           LaneBackend backend = LaneBackend::Native);

/**
 * Sum of a with W float partial accumulators.
 *
 * The main loop adds W elements at a time lane-wise, tail elements are added
 * one by one into accumulator 0, and the partials are then added in lane
 * order into a zero-initialized scalar. Throws ArgumentError on empty input.
 */
float vsum(std::span<const float> a, LaneConfig cfg = {},
           LaneBackend backend = LaneBackend::Native);

/// out[i] = a[i] - v. out may alias a exactly. Throws ArgumentError on empty
/// input or a size mismatch.
void vsub_broadcast(std::span<const float> a, float v, std::span<float> out,
                    LaneConfig cfg = {}, LaneBackend backend = LaneBackend::Native);

/// Smallest argument accepted by vexp.
inline constexpr float kVexpDomainLow = -87.0f;

/**
 * Polynomial exponential, lane-wise.
 *
 * x = k ln2 + r with |r| <= ln2/2 (two-constant Cody-Waite split), a degree-6
 * polynomial for e^r, and 2^k applied through the exponent field. Maximum
 * relative error below 2e-7 on [-87, 0] and monotone there. out may alias a.
 * Throws NumericDomainError when an element lies outside [-87, 0].
 */
void vexp(std::span<const float> a, std::span<float> out, LaneConfig cfg = {},
          LaneBackend backend = LaneBackend::Native);

/**
 * vexp without the domain check, for shifted logits: arguments below -88 are
 * treated as -88, and results below the smallest normal float are flushed to
 * +0. Inputs must not be NaN. Identical to vexp on [-87, 0].
 */
void vexp_flush(std::span<const float> a, std::span<float> out, LaneConfig cfg = {},
                LaneBackend backend = LaneBackend::Native);

}  // namespace softmax_kit
