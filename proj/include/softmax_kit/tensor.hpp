#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>

namespace softmax_kit {

inline constexpr std::size_t kMatrixAlignment = 32;

/**
 * Row-major batch x classes buffer of 32-bit floats.
 *
 * Element (n, c) lives at data()[n * cols() + c]. The buffer start is aligned
 * to kMatrixAlignment bytes so 8-lane vector loads never straddle a 32-byte
 * boundary at a row that starts on one. Copies are deep.
 */
class Matrix2D {
 public:
  Matrix2D(std::size_t rows, std::size_t cols);

  Matrix2D(const Matrix2D& other);
  Matrix2D& operator=(const Matrix2D& other);
  Matrix2D(Matrix2D&&) noexcept = default;
  Matrix2D& operator=(Matrix2D&&) noexcept = default;
  ~Matrix2D() = default;

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return rows_ * cols_; }

  std::span<float> data() noexcept { return {data_.get(), size()}; }
  std::span<const float> data() const noexcept { return {data_.get(), size()}; }

  std::span<float> row(std::size_t n) noexcept { return {data_.get() + n * cols_, cols_}; }
  std::span<const float> row(std::size_t n) const noexcept {
    return {data_.get() + n * cols_, cols_};
  }

  float& operator()(std::size_t n, std::size_t c) noexcept { return data_[n * cols_ + c]; }
  float operator()(std::size_t n, std::size_t c) const noexcept { return data_[n * cols_ + c]; }

  /// Same shape and bit-identical contents.
  bool bitwise_equal(const Matrix2D& other) const noexcept;

 private:
  struct AlignedDelete {
    void operator()(float* p) const noexcept;
  };

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::unique_ptr<float[], AlignedDelete> data_;
};

/// Zero-initialized rows x cols matrix. Throws ArgumentError on a zero
/// dimension or a size overflow, ResourceError when allocation fails.
Matrix2D alloc_matrix(std::size_t rows, std::size_t cols);

/// Uniform fill parameters. Same seed, range and shape give the same bits.
struct FillSpec {
  std::uint64_t seed = 0;
  float low = -5.0f;
  float high = 5.0f;
};

/**
 * Fills m with values drawn from the open interval (low, high).
 *
 * Generator: std::mt19937_64 seeded with spec.seed, one 64-bit draw per
 * element in row-major order. The top 24 bits b of a draw map to
 * u = (b + 0.5) / 2^24, and the element is low + (high - low) * u evaluated in
 * double and rounded to float; a result that rounds onto an endpoint is moved
 * one float step inside. Both pieces are fully specified, so buffers are
 * reproducible across platforms and standard libraries.
 */
Matrix2D& fill_uniform(Matrix2D& m, const FillSpec& spec);

}  // namespace softmax_kit
