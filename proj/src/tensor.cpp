#include "softmax_kit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <random>
#include <string>

#include "softmax_kit/errors.hpp"

namespace softmax_kit {

namespace {

float* allocate_floats(std::size_t count) {
  try {
    void* p = ::operator new(count * sizeof(float), std::align_val_t{kMatrixAlignment});
    return static_cast<float*>(p);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate " + std::to_string(count) + " floats");
  }
}

}  // namespace

void Matrix2D::AlignedDelete::operator()(float* p) const noexcept {
  ::operator delete(p, std::align_val_t{kMatrixAlignment});
}

Matrix2D::Matrix2D(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  if (rows == 0 || cols == 0) {
    throw ArgumentError("matrix dimensions must be >= 1, got " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }
  if (rows > std::numeric_limits<std::size_t>::max() / sizeof(float) / cols) {
    throw ArgumentError("matrix size overflows: " + std::to_string(rows) + "x" +
                        std::to_string(cols));
  }
  data_.reset(allocate_floats(rows * cols));
  std::fill_n(data_.get(), rows * cols, 0.0f);
}

Matrix2D::Matrix2D(const Matrix2D& other)
    : rows_(other.rows_), cols_(other.cols_), data_(allocate_floats(other.size())) {
  std::memcpy(data_.get(), other.data_.get(), size() * sizeof(float));
}

Matrix2D& Matrix2D::operator=(const Matrix2D& other) {
  if (this != &other) {
    Matrix2D copy(other);
    *this = std::move(copy);
  }
  return *this;
}

bool Matrix2D::bitwise_equal(const Matrix2D& other) const noexcept {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         std::memcmp(data_.get(), other.data_.get(), size() * sizeof(float)) == 0;
}

Matrix2D alloc_matrix(std::size_t rows, std::size_t cols) { return Matrix2D(rows, cols); }

Matrix2D& fill_uniform(Matrix2D& m, const FillSpec& spec) {
  if (!std::isfinite(spec.low) || !std::isfinite(spec.high) || !(spec.low < spec.high)) {
    throw ArgumentError("fill range requires finite low < high");
  }
  std::mt19937_64 gen(spec.seed);
  const double low = spec.low;
  const double span = static_cast<double>(spec.high) - low;
  const float inner_low = std::nextafter(spec.low, spec.high);
  const float inner_high = std::nextafter(spec.high, spec.low);
  if (inner_low > inner_high) {
    throw ArgumentError("fill range contains no float strictly between its endpoints");
  }
  for (float& x : m.data()) {
    const double u = (static_cast<double>(gen() >> 40) + 0.5) * 0x1.0p-24;
    const float v = static_cast<float>(low + span * u);
    x = std::clamp(v, inner_low, inner_high);
  }
  return m;
}

}  // namespace softmax_kit
