#include "softmax_kit/bound_probe.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "softmax_kit/errors.hpp"

namespace softmax_kit {

namespace {

void copy_into(const Matrix2D& in, Matrix2D& out) noexcept {
  std::memcpy(out.data().data(), in.data().data(), in.size() * sizeof(float));
}

void require_reps(std::size_t reps) {
  if (reps < 3) throw ArgumentError("bound probe needs reps >= 3");
}

}  // namespace

std::string_view verdict_name(BoundVerdict v) noexcept {
  return v == BoundVerdict::MemoryBoundLikely ? "MemoryBoundLikely" : "ComputeBoundLikely";
}

Ticks copy_baseline(const Matrix2D& m, std::size_t reps, std::size_t warmup) {
  require_reps(reps);
  Matrix2D out(m.rows(), m.cols());
  for (std::size_t i = 0; i < warmup; ++i) copy_into(m, out);
  std::vector<Ticks> samples(reps);
  for (auto& s : samples) {
    const Ticks t0 = now();
    copy_into(m, out);
    s = now() - t0;
  }
  if (!out.bitwise_equal(m)) throw std::logic_error("copy_baseline: copy does not match input");
  return summarize(samples).median;
}

BoundProbeResult probe(const Matrix2D& m, std::optional<KernelVariant> variant, std::size_t reps,
                       std::size_t warmup) {
  require_reps(reps);
  if (variant) check_finite(m);
  Matrix2D subject_out(m.rows(), m.cols());
  Matrix2D copy_out(m.rows(), m.cols());

  auto run_subject = [&] {
    if (variant) {
      softmax_into_unchecked(m, subject_out, *variant);
    } else {
      copy_into(m, subject_out);
    }
  };
  for (std::size_t i = 0; i < warmup; ++i) {
    run_subject();
    copy_into(m, copy_out);
  }

  std::vector<Ticks> subject(reps), copy(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    Ticks t0 = now();
    run_subject();
    subject[i] = now() - t0;
    t0 = now();
    copy_into(m, copy_out);
    copy[i] = now() - t0;
  }
  if (!copy_out.bitwise_equal(m)) throw std::logic_error("probe: copy does not match input");

  BoundProbeResult r;
  r.kernel_ticks = std::max<Ticks>(summarize(subject).median, 1);
  r.copy_ticks = std::max<Ticks>(summarize(copy).median, 1);
  r.ratio = static_cast<double>(r.kernel_ticks) / static_cast<double>(r.copy_ticks);
  r.verdict = classify(r.ratio);
  return r;
}

}  // namespace softmax_kit
