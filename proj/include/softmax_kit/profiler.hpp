#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "softmax_kit/kernels.hpp"
#include "softmax_kit/tensor.hpp"

namespace softmax_kit {

using Ticks = std::uint64_t;

/**
 * Monotonic tick counter with a calibrated rate.
 *
 * Two sources: the invariant time-stamp counter on x86 (calibrated against
 * std::chrono::steady_clock over ~20 ms when constructed) and steady_clock
 * itself in nanoseconds. global() picks the TSC when the CPU reports an
 * invariant one.
 */
class Timer {
 public:
  enum class Source { Steady, Tsc };

  /// Throws ArgumentError when Source::Tsc is requested but unavailable.
  explicit Timer(Source source);

  static const Timer& global();
  static bool tsc_available() noexcept;

  Ticks now() const noexcept;
  double ticks_per_second() const noexcept { return ticks_per_second_; }
  double seconds(Ticks t) const noexcept { return static_cast<double>(t) / ticks_per_second_; }
  Source source() const noexcept { return source_; }
  std::string_view source_name() const noexcept;

 private:
  Source source_;
  double ticks_per_second_ = 1e9;
};

/// Reads Timer::global(). Usable as a kernels TickSource.
Ticks now() noexcept;

enum class PhaseId { MaxSub, Exp, SumScale, WholeOp };

inline constexpr std::array<PhaseId, 4> kAllPhases = {PhaseId::MaxSub, PhaseId::Exp,
                                                      PhaseId::SumScale, PhaseId::WholeOp};

/// "MaxSub", "Exp", "SumScale", "WholeOp".
std::string_view phase_name(PhaseId id) noexcept;

/// Ticks spent in each phase of one softmax execution. The three phases are
/// nested inside whole_op, so their sum never exceeds it.
struct PhaseTimings {
  Ticks max_sub = 0;
  Ticks exp = 0;
  Ticks sum_scale = 0;
  Ticks whole_op = 0;

  Ticks operator[](PhaseId id) const noexcept;
};

/// Runs `warmup` untimed executions, then `reps` timed ones on a single
/// output buffer allocated up front. Throws ArgumentError when reps == 0 and
/// NumericDomainError on non-finite input.
std::vector<PhaseTimings> time_phases(const Matrix2D& m, KernelVariant variant, std::size_t reps,
                                      std::size_t warmup = 10);

/// Median (mean of the two middle values for an even count) and minimum.
struct TickSummary {
  Ticks median = 0;
  Ticks min = 0;
};
TickSummary summarize(std::span<const Ticks> samples);

/// One row of a profile table. Times are in the report's ticks.
struct EventStats {
  std::string name;
  std::uint64_t calls = 0;
  double total = 0;
  double min = 0;
  double max = 0;
  double ave = 0;
  double ratio = 0;  // total / sum of all events' totals
};

struct ProfileReport {
  std::vector<EventStats> events;  // sorted by total, descending
  double ticks_per_second = 1000.0;
};

struct EventSamples {
  std::string name;
  std::vector<Ticks> samples;
};

/// Aggregates samples per event and sorts by total descending (stable for
/// ties). Throws ArgumentError on no events, an event without samples, or a
/// name containing whitespace.
ProfileReport build_report(std::span<const EventSamples> events, double ticks_per_second);

/**
 * Fixed-column profile table:
 *
 *     ------------------------->     Profiling Report     <-----------------------
 *
 *     Place: CPU
 *     Time unit: ms
 *     Sorted by total time in descending order in the same thread
 *
 *     Event                Calls    Total     Min.      Max.      Ave.       Ratio.
 *     thread0::layer_norm  316000   68958     0.21599   18.1111   0.218222   0.396
 *
 * Times are milliseconds at 6 significant digits, ratios at 3 decimals, no
 * trailing whitespace.
 */
std::string format_report(const ProfileReport& report);

/// event,calls,total_ms,min_ms,max_ms,ave_ms,ratio
std::string format_report_csv(const ProfileReport& report);

/// Inverse of format_report at its printed precision. The result is in
/// milliseconds (ticks_per_second = 1000). Throws ArgumentError on text that
/// is not a report.
ProfileReport parse_report(std::string_view text);

}  // namespace softmax_kit
