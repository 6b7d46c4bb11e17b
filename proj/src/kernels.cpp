#include "softmax_kit/kernels.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include "softmax_kit/errors.hpp"
#include "softmax_kit/simd_reduce.hpp"

namespace softmax_kit {

namespace {

constexpr std::array<std::string_view, 6> kVariantNames = {
    "reference_clipped", "reference_inference", "mkl_style_scalar",
    "vectorized_sum",    "full_vectorized",     "full_vectorized_approx_exp",
};

struct Batch {
  const float* in;
  float* out;
  std::size_t rows;
  std::size_t cols;
  RowStats* stats;  // optional, one entry per row

  std::span<const float> in_row(std::size_t n) const { return {in + n * cols, cols}; }
  std::span<float> out_row(std::size_t n) const { return {out + n * cols, cols}; }
  std::span<float> out_all() const { return {out, rows * cols}; }
};

struct Options {
  bool skip_shift = false;
};

std::uint64_t read(TickSource ticks) noexcept { return ticks ? ticks() : 0; }

void scale_unchecked(std::span<float> row, float sum) noexcept {
  const float inv = 1.0f / sum;
  for (float& x : row) x *= inv;
}

// Separate whole-batch passes with per-row temporaries for the maxima and the
// sums, as a tensor-expression implementation evaluates them.
void run_reference(const Batch& b, bool clip, Options opt, PhaseMarks& marks, TickSource ticks) {
  std::vector<float> maxima(b.rows, 0.0f);
  if (!opt.skip_shift) {
    for (std::size_t n = 0; n < b.rows; ++n) maxima[n] = row_max_scalar(b.in_row(n));
  }
  for (std::size_t n = 0; n < b.rows; ++n) subtract_broadcast(b.in_row(n), maxima[n], b.out_row(n));
  if (clip) {
    for (float& x : b.out_all()) x = value_clip(x);
  }
  marks.max_sub_end = read(ticks);

  exp_batch(b.out_all());
  marks.exp_end = read(ticks);

  std::vector<float> sums(b.rows);
  for (std::size_t n = 0; n < b.rows; ++n) sums[n] = row_sum_scalar(b.out_row(n));
  for (std::size_t n = 0; n < b.rows; ++n) scale_unchecked(b.out_row(n), sums[n]);
  marks.sum_scale_end = read(ticks);

  if (b.stats) {
    for (std::size_t n = 0; n < b.rows; ++n) b.stats[n] = {maxima[n], sums[n]};
  }
}

// Row loops fused around a single whole-batch exponential call.
template <bool kLaneMax, bool kLaneSum, bool kApproxExp>
void run_fused(const Batch& b, Options opt, PhaseMarks& marks, TickSource ticks) {
  for (std::size_t n = 0; n < b.rows; ++n) {
    const auto in = b.in_row(n);
    float m = 0.0f;
    if (!opt.skip_shift) m = kLaneMax ? vmax(in) : row_max_scalar(in);
    if constexpr (kLaneMax) {
      vsub_broadcast(in, m, b.out_row(n));
    } else {
      subtract_broadcast(in, m, b.out_row(n));
    }
    if (b.stats) b.stats[n].max = m;
  }
  marks.max_sub_end = read(ticks);

  if constexpr (kApproxExp) {
    vexp_flush(b.out_all(), b.out_all());
  } else {
    exp_batch(b.out_all());
  }
  marks.exp_end = read(ticks);

  for (std::size_t n = 0; n < b.rows; ++n) {
    const auto out = b.out_row(n);
    const float s = kLaneSum ? vsum(out) : row_sum_scalar(out);
    scale_unchecked(out, s);
    if (b.stats) b.stats[n].sum = s;
  }
  marks.sum_scale_end = read(ticks);
}

PhaseMarks run(const Batch& b, KernelVariant variant, Options opt, TickSource ticks) {
  PhaseMarks marks;
  marks.begin = read(ticks);
  switch (variant) {
    case KernelVariant::ReferenceClipped:
      run_reference(b, true, opt, marks, ticks);
      break;
    case KernelVariant::ReferenceInference:
      run_reference(b, false, opt, marks, ticks);
      break;
    case KernelVariant::MklStyleScalar:
      run_fused<false, false, false>(b, opt, marks, ticks);
      break;
    case KernelVariant::VectorizedSum:
      run_fused<false, true, false>(b, opt, marks, ticks);
      break;
    case KernelVariant::FullVectorized:
      run_fused<true, true, false>(b, opt, marks, ticks);
      break;
    case KernelVariant::FullVectorizedApproxExp:
      run_fused<true, true, true>(b, opt, marks, ticks);
      break;
  }
  return marks;
}

void require_same_shape(const Matrix2D& in, const Matrix2D& out) {
  if (in.rows() != out.rows() || in.cols() != out.cols()) {
    throw ArgumentError("softmax: output shape " + std::to_string(out.rows()) + "x" +
                        std::to_string(out.cols()) + " does not match input " +
                        std::to_string(in.rows()) + "x" + std::to_string(in.cols()));
  }
}

Batch batch_of(const Matrix2D& in, Matrix2D& out) {
  return {in.data().data(), out.data().data(), in.rows(), in.cols(), nullptr};
}

}  // namespace

std::string_view variant_name(KernelVariant v) noexcept {
  return kVariantNames[static_cast<std::size_t>(v)];
}

std::optional<KernelVariant> parse_variant(std::string_view name) noexcept {
  for (KernelVariant v : kAllVariants) {
    if (variant_name(v) == name) return v;
  }
  return std::nullopt;
}

float row_max_scalar(std::span<const float> row) {
  if (row.empty()) throw ArgumentError("row_max_scalar: empty row");
  float m = row[0];
  for (std::size_t c = 1; c < row.size(); ++c) m = row[c] > m ? row[c] : m;
  return m;
}

void subtract_broadcast(std::span<const float> row, float v, std::span<float> out) {
  if (row.size() != out.size()) throw ArgumentError("subtract_broadcast: size mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = row[c] - v;
}

std::vector<float> subtract_broadcast(std::span<const float> row, float v) {
  std::vector<float> out(row.size());
  subtract_broadcast(row, v, out);
  return out;
}

void exp_batch(std::span<float> buf) noexcept {
  for (float& x : buf) {
    const float y = std::exp(x);
    x = y < FLT_MIN ? 0.0f : y;
  }
}

float row_sum_scalar(std::span<const float> row) {
  if (row.empty()) throw ArgumentError("row_sum_scalar: empty row");
  double acc = row[0];
  for (std::size_t c = 1; c < row.size(); ++c) acc += row[c];
  return static_cast<float>(acc);
}

void scale_reciprocal(std::span<float> row, float sum) {
  if (!std::isfinite(sum) || !(sum > 0.0f)) {
    throw NumericDomainError("scale_reciprocal: normalizer must be finite and positive, got " +
                             std::to_string(sum));
  }
  scale_unchecked(row, sum);
}

void check_finite(const Matrix2D& m) {
  for (std::size_t n = 0; n < m.rows(); ++n) {
    for (float x : m.row(n)) {
      if (!std::isfinite(x)) {
        throw NumericDomainError("softmax: non-finite logit in row " + std::to_string(n), n);
      }
    }
  }
}

Matrix2D softmax(const Matrix2D& m, KernelVariant variant) {
  check_finite(m);
  Matrix2D out(m.rows(), m.cols());
  softmax_into_unchecked(m, out, variant);
  return out;
}

void softmax_into(const Matrix2D& in, Matrix2D& out, KernelVariant variant) {
  require_same_shape(in, out);
  check_finite(in);
  softmax_into_unchecked(in, out, variant);
}

RowStats softmax_row(std::span<const float> logits, std::span<float> out, KernelVariant variant) {
  if (logits.empty()) throw ArgumentError("softmax_row: empty row");
  if (logits.size() != out.size()) throw ArgumentError("softmax_row: size mismatch");
  for (float x : logits) {
    if (!std::isfinite(x)) throw NumericDomainError("softmax_row: non-finite logit", 0);
  }
  RowStats stats{};
  run({logits.data(), out.data(), 1, logits.size(), &stats}, variant, {}, nullptr);
  return stats;
}

PhaseMarks softmax_into_unchecked(const Matrix2D& in, Matrix2D& out, KernelVariant variant,
                                  TickSource ticks) {
  require_same_shape(in, out);
  return run(batch_of(in, out), variant, {}, ticks);
}

namespace testing {

void softmax_into_without_shift(const Matrix2D& in, Matrix2D& out, KernelVariant variant) {
  require_same_shape(in, out);
  run(batch_of(in, out), variant, {.skip_shift = true}, nullptr);
}

}  // namespace testing

}  // namespace softmax_kit
