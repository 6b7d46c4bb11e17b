#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "softmax_kit/tensor.hpp"

namespace softmax_kit {

/// One rung of the optimization ladder, in ladder order.
enum class KernelVariant {
  ReferenceClipped,         // separate passes with row temporaries, shifted logits clipped
  ReferenceInference,       // same passes, no clip
  MklStyleScalar,           // fused row loops around one whole-batch exp call
  VectorizedSum,            // MklStyleScalar with the lane-accumulator row sum
  FullVectorized,           // lane max, subtract and sum around the platform exp
  FullVectorizedApproxExp,  // FullVectorized with the polynomial exp
};

inline constexpr std::array<KernelVariant, 6> kAllVariants = {
    KernelVariant::ReferenceClipped, KernelVariant::ReferenceInference,
    KernelVariant::MklStyleScalar,   KernelVariant::VectorizedSum,
    KernelVariant::FullVectorized,   KernelVariant::FullVectorizedApproxExp,
};

/// snake_case name used on the command line and in reports.
std::string_view variant_name(KernelVariant v) noexcept;
std::optional<KernelVariant> parse_variant(std::string_view name) noexcept;

/// True for variants whose exponential is the platform one (not the polynomial).
constexpr bool uses_exact_exp(KernelVariant v) noexcept {
  return v != KernelVariant::FullVectorizedApproxExp;
}

/// Row maximum and the row's normalizer sum(exp(z - max)).
struct RowStats {
  float max;
  float sum;
};

// ---------------------------------------------------------------------------
// Component operations

/// Sequential left-to-right scan `x > m ? x : m` starting from row[0].
/// Throws ArgumentError on an empty row.
float row_max_scalar(std::span<const float> row);

/// out[c] = row[c] - v. out may alias row exactly.
void subtract_broadcast(std::span<const float> row, float v, std::span<float> out);
std::vector<float> subtract_broadcast(std::span<const float> row, float v);

/// Floor applied to shifted logits by ReferenceClipped. e^-64 ~ 1.6e-28 is a
/// normal float, so clipped outputs never underflow.
inline constexpr float kClipFloor = -64.0f;

constexpr float value_clip(float x) noexcept { return x > kClipFloor ? x : kClipFloor; }

/// In-place std::exp over the whole buffer; results below the smallest
/// normal float are flushed to +0.
void exp_batch(std::span<float> buf) noexcept;

/// Strict left-to-right sum. The accumulator is double; the result is
/// rounded to float once at the end. Throws ArgumentError on an empty row.
float row_sum_scalar(std::span<const float> row);

/// row[c] *= 1/sum with the reciprocal formed once. Throws NumericDomainError
/// unless sum is finite and positive.
void scale_reciprocal(std::span<float> row, float sum);

// ---------------------------------------------------------------------------
// Composed softmax

/// Throws NumericDomainError naming the first row that holds a NaN or
/// infinity.
void check_finite(const Matrix2D& m);

/// Row-wise softmax of m. Throws NumericDomainError on non-finite input.
Matrix2D softmax(const Matrix2D& m, KernelVariant variant);

/// As softmax() but writes into out, which must have m's shape.
void softmax_into(const Matrix2D& in, Matrix2D& out, KernelVariant variant);

/// Single row; returns the row's max and normalizer as computed by the
/// variant. Throws on empty or non-finite rows, or a size mismatch.
RowStats softmax_row(std::span<const float> logits, std::span<float> out, KernelVariant variant);

/// Tick counter handed to the instrumented entry point.
using TickSource = std::uint64_t (*)() noexcept;

/// Counter values at the start of the kernel and at the end of each of its
/// three phases: max + subtract (+ clip), exp, sum + scale.
struct PhaseMarks {
  std::uint64_t begin = 0;
  std::uint64_t max_sub_end = 0;
  std::uint64_t exp_end = 0;
  std::uint64_t sum_scale_end = 0;
};

/// Kernel entry without input validation; in must already have passed
/// check_finite(). When ticks is non-null the phase boundaries are recorded.
PhaseMarks softmax_into_unchecked(const Matrix2D& in, Matrix2D& out, KernelVariant variant,
                                  TickSource ticks = nullptr);

namespace testing {

/// Fault injection for verification tests: runs the variant with the max
/// shift skipped (exp of raw logits), which overflows for large logits.
void softmax_into_without_shift(const Matrix2D& in, Matrix2D& out, KernelVariant variant);

}  // namespace testing

}  // namespace softmax_kit
