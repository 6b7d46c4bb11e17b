#include <cmath>
#include <string>

#include "simd_reduce/lane_kernels.hpp"
#include "softmax_kit/errors.hpp"
#include "softmax_kit/simd_reduce.hpp"

namespace softmax_kit {

namespace {

const detail::LaneKernels& select(LaneConfig cfg, LaneBackend backend) {
  if (backend == LaneBackend::Native) {
    if (const auto* native = detail::native_kernels(cfg.width())) return *native;
  }
  return detail::portable_kernels(cfg.width());
}

void require_nonempty(std::size_t n, const char* op) {
  if (n == 0) throw ArgumentError(std::string(op) + ": empty array");
}

void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) throw ArgumentError(std::string(op) + ": output size does not match input");
}

}  // namespace

LaneConfig::LaneConfig(std::size_t width) : width_(width) {
  if (width != 4 && width != 8 && width != 16) {
    throw ArgumentError("lane width must be 4, 8 or 16, got " + std::to_string(width));
  }
}

bool native_lanes_available(LaneConfig cfg) noexcept {
  return detail::native_kernels(cfg.width()) != nullptr;
}

std::string_view native_lanes_name(LaneConfig cfg) noexcept {
  return select(cfg, LaneBackend::Native).name;
}

float vmax(std::span<const float> a, LaneConfig cfg, LaneBackend backend) {
  require_nonempty(a.size(), "vmax");
  return select(cfg, backend).max(a.data(), a.size());
}

float vsum(std::span<const float> a, LaneConfig cfg, LaneBackend backend) {
  require_nonempty(a.size(), "vsum");
  return select(cfg, backend).sum(a.data(), a.size());
}

void vsub_broadcast(std::span<const float> a, float v, std::span<float> out, LaneConfig cfg,
                    LaneBackend backend) {
  require_nonempty(a.size(), "vsub_broadcast");
  require_same_size(a.size(), out.size(), "vsub_broadcast");
  select(cfg, backend).sub(a.data(), v, out.data(), a.size());
}

void vexp(std::span<const float> a, std::span<float> out, LaneConfig cfg, LaneBackend backend) {
  require_same_size(a.size(), out.size(), "vexp");
  for (std::size_t i = 0; i < a.size(); ++i) {
    // Written so that NaN fails the check.
    if (!(a[i] >= kVexpDomainLow && a[i] <= 0.0f)) {
      throw NumericDomainError("vexp: argument " + std::to_string(a[i]) + " at index " +
                               std::to_string(i) + " outside [-87, 0]");
    }
  }
  select(cfg, backend).exp(a.data(), out.data(), a.size());
}

void vexp_flush(std::span<const float> a, std::span<float> out, LaneConfig cfg,
                LaneBackend backend) {
  require_same_size(a.size(), out.size(), "vexp_flush");
  select(cfg, backend).exp(a.data(), out.data(), a.size());
}

}  // namespace softmax_kit
