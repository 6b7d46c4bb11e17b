#pragma once

#include <cstddef>

namespace softmax_kit::detail {

// Unchecked kernels over n >= 1 elements (n >= 0 for sub and exp).
struct LaneKernels {
  float (*max)(const float* a, std::size_t n);
  float (*sum)(const float* a, std::size_t n);
  void (*sub)(const float* a, float v, float* out, std::size_t n);
  void (*exp)(const float* a, float* out, std::size_t n);
  const char* name;
};

const LaneKernels& portable_kernels(std::size_t width);

// nullptr when the running CPU has no vector path of this width.
const LaneKernels* native_kernels(std::size_t width) noexcept;

}  // namespace softmax_kit::detail
