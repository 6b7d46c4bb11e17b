// W-lane scalar emulation. This is the definitional semantics of the lane
// kernels; native paths in x86.cpp reproduce it bit for bit.

#include <array>
#include <cstddef>

#include "simd_reduce/exp_poly.hpp"
#include "simd_reduce/lane_kernels.hpp"

namespace softmax_kit::detail {

namespace {

template <std::size_t W>
struct Lanes {
  std::array<float, W> v;

  static Lanes broadcast(float x) {
    Lanes r;
    r.v.fill(x);
    return r;
  }

  static Lanes load(const float* p) {
    Lanes r;
    for (std::size_t i = 0; i < W; ++i) r.v[i] = p[i];
    return r;
  }

  // W/2 elements repeated in both halves of the register.
  static Lanes load_half_dup(const float* p) {
    Lanes r;
    for (std::size_t i = 0; i < W; ++i) r.v[i] = p[i % (W / 2)];
    return r;
  }

  template <class Index>
  Lanes permute(Index idx) const {
    Lanes r;
    for (std::size_t i = 0; i < W; ++i) r.v[i] = v[idx(i)];
    return r;
  }
};

// Same selection as a packed max instruction: a > b ? a : b.
template <std::size_t W>
Lanes<W> lane_max(const Lanes<W>& a, const Lanes<W>& b) {
  Lanes<W> r;
  for (std::size_t i = 0; i < W; ++i) r.v[i] = a.v[i] > b.v[i] ? a.v[i] : b.v[i];
  return r;
}

// Swap halves down to 128-bit groups, reverse each group of four, then fold
// the neighbouring pair into lane 0.
template <std::size_t W>
float horizontal_max(Lanes<W> acc) {
  for (std::size_t h = W / 2; h >= 4; h /= 2) {
    acc = lane_max(acc, acc.permute([h](std::size_t i) { return i ^ h; }));
  }
  acc = lane_max(acc, acc.permute([](std::size_t i) { return (i & ~std::size_t{3}) | (3 - (i & 3)); }));
  return acc.v[0] > acc.v[1] ? acc.v[0] : acc.v[1];
}

template <std::size_t W>
float max_kernel(const float* a, std::size_t n) {
  auto acc = Lanes<W>::broadcast(a[0]);
  const std::size_t main_end = n / W * W;
  std::size_t i = 0;
  for (; i < main_end; i += W) acc = lane_max(acc, Lanes<W>::load(a + i));
  if (n - i >= W / 2) {
    acc = lane_max(acc, Lanes<W>::load_half_dup(a + i));
    i += W / 2;
  }
  for (; i < n; ++i) acc = lane_max(acc, Lanes<W>::broadcast(a[i]));
  return horizontal_max(acc);
}

template <std::size_t W>
float sum_kernel(const float* a, std::size_t n) {
  auto acc = Lanes<W>::broadcast(0.0f);
  const std::size_t main_end = n / W * W;
  std::size_t i = 0;
  for (; i < main_end; i += W) {
    for (std::size_t l = 0; l < W; ++l) acc.v[l] += a[i + l];
  }
  for (; i < n; ++i) acc.v[0] += a[i];
  float total = 0.0f;
  for (std::size_t l = 0; l < W; ++l) total += acc.v[l];
  return total;
}

template <std::size_t W>
void sub_kernel(const float* a, float v, float* out, std::size_t n) {
  const std::size_t main_end = n / W * W;
  std::size_t i = 0;
  for (; i < main_end; i += W) {
    for (std::size_t l = 0; l < W; ++l) out[i + l] = a[i + l] - v;
  }
  for (; i < n; ++i) out[i] = a[i] - v;
}

template <std::size_t W>
void exp_kernel(const float* a, float* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = exp_lane(a[i]);
}

template <std::size_t W>
constexpr LaneKernels make_kernels(const char* name) {
  return {&max_kernel<W>, &sum_kernel<W>, &sub_kernel<W>, &exp_kernel<W>, name};
}

constexpr LaneKernels kPortable4 = make_kernels<4>("portable-w4");
constexpr LaneKernels kPortable8 = make_kernels<8>("portable-w8");
constexpr LaneKernels kPortable16 = make_kernels<16>("portable-w16");

}  // namespace

const LaneKernels& portable_kernels(std::size_t width) {
  switch (width) {
    case 4:
      return kPortable4;
    case 16:
      return kPortable16;
    default:
      return kPortable8;
  }
}

}  // namespace softmax_kit::detail
