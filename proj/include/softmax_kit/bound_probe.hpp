#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "softmax_kit/kernels.hpp"
#include "softmax_kit/profiler.hpp"
#include "softmax_kit/tensor.hpp"

namespace softmax_kit {

/// Kernel-to-copy time ratio at or below which a kernel is reported as
/// memory bound.
inline constexpr double kMemoryBoundRatio = 1.3;

enum class BoundVerdict { MemoryBoundLikely, ComputeBoundLikely };

std::string_view verdict_name(BoundVerdict v) noexcept;

struct BoundProbeResult {
  Ticks kernel_ticks = 0;  // median
  Ticks copy_ticks = 0;    // median
  double ratio = 0;        // kernel_ticks / copy_ticks
  BoundVerdict verdict = BoundVerdict::ComputeBoundLikely;
};

/// Verdict for a given ratio.
constexpr BoundVerdict classify(double ratio) noexcept {
  return ratio <= kMemoryBoundRatio ? BoundVerdict::MemoryBoundLikely
                                    : BoundVerdict::ComputeBoundLikely;
}

/// Median ticks of a std::memcpy of m into a preallocated same-size buffer.
/// The copy is checked bit-for-bit after the last rep. Throws ArgumentError
/// when reps < 3.
Ticks copy_baseline(const Matrix2D& m, std::size_t reps, std::size_t warmup = 10);

/**
 * Times `variant` (or, when empty, the copy itself: a self-probe) against the
 * copy baseline. Reps alternate subject and copy so both see the same cache
 * and frequency conditions; both write to output buffers allocated once.
 */
BoundProbeResult probe(const Matrix2D& m, std::optional<KernelVariant> variant, std::size_t reps,
                       std::size_t warmup = 10);

}  // namespace softmax_kit
