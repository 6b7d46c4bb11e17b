#include "softmax_kit/profiler.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "softmax_kit/errors.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <cpuid.h>
#include <x86intrin.h>
#define SMK_HAVE_TSC 1
#endif

namespace softmax_kit {

namespace {

Ticks steady_ns() noexcept {
  return static_cast<Ticks>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                std::chrono::steady_clock::now().time_since_epoch())
                                .count());
}

Ticks tsc() noexcept {
#ifdef SMK_HAVE_TSC
  return __rdtsc();
#else
  return steady_ns();
#endif
}

double calibrate_tsc() {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const Ticks c0 = tsc();
  auto t1 = t0;
  while (t1 - t0 < std::chrono::milliseconds(20)) t1 = clock::now();
  const Ticks c1 = tsc();
  const double secs = std::chrono::duration<double>(t1 - t0).count();
  return static_cast<double>(c1 - c0) / secs;
}

std::string ms_field(double ticks, double tps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", ticks / tps * 1e3);
  return buf;
}

std::string ratio_field(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ratio);
  return buf;
}

void pad_to(std::string& line, std::size_t column) {
  line.append(column > line.size() ? column - line.size() : 1, ' ');
}

constexpr std::string_view kBanner =
    "------------------------->     Profiling Report     <-----------------------";
constexpr std::string_view kSortLine =
    "Sorted by total time in descending order in the same thread";
constexpr std::array<std::string_view, 6> kNumericHeaders = {"Calls", "Total", "Min.",
                                                             "Max.",  "Ave.",  "Ratio."};
constexpr std::array<std::size_t, 5> kColumnWidths = {9, 10, 10, 10, 11};

}  // namespace

// ---------------------------------------------------------------------------
// Timer

bool Timer::tsc_available() noexcept {
#ifdef SMK_HAVE_TSC
  unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
  if (!__get_cpuid(0x80000007u, &eax, &ebx, &ecx, &edx)) return false;
  return (edx & (1u << 8)) != 0;  // invariant TSC
#else
  return false;
#endif
}

Timer::Timer(Source source) : source_(source) {
  if (source == Source::Tsc) {
    if (!tsc_available()) throw ArgumentError("invariant TSC not available on this CPU");
    ticks_per_second_ = calibrate_tsc();
  }
}

const Timer& Timer::global() {
  static const Timer timer(tsc_available() ? Source::Tsc : Source::Steady);
  return timer;
}

Ticks Timer::now() const noexcept { return source_ == Source::Tsc ? tsc() : steady_ns(); }

std::string_view Timer::source_name() const noexcept {
  return source_ == Source::Tsc ? "tsc" : "steady_clock";
}

Ticks now() noexcept {
  static const Timer& timer = Timer::global();
  return timer.now();
}

// ---------------------------------------------------------------------------
// Phase timing

std::string_view phase_name(PhaseId id) noexcept {
  switch (id) {
    case PhaseId::MaxSub:
      return "MaxSub";
    case PhaseId::Exp:
      return "Exp";
    case PhaseId::SumScale:
      return "SumScale";
    case PhaseId::WholeOp:
      return "WholeOp";
  }
  return "?";
}

Ticks PhaseTimings::operator[](PhaseId id) const noexcept {
  switch (id) {
    case PhaseId::MaxSub:
      return max_sub;
    case PhaseId::Exp:
      return exp;
    case PhaseId::SumScale:
      return sum_scale;
    case PhaseId::WholeOp:
      return whole_op;
  }
  return 0;
}

std::vector<PhaseTimings> time_phases(const Matrix2D& m, KernelVariant variant, std::size_t reps,
                                      std::size_t warmup) {
  if (reps == 0) throw ArgumentError("time_phases: reps must be >= 1");
  check_finite(m);
  Matrix2D out(m.rows(), m.cols());
  for (std::size_t i = 0; i < warmup; ++i) softmax_into_unchecked(m, out, variant);

  std::vector<PhaseTimings> timings;
  timings.reserve(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    const Ticks t0 = now();
    const PhaseMarks marks = softmax_into_unchecked(m, out, variant, &now);
    const Ticks t1 = now();
    timings.push_back({marks.max_sub_end - marks.begin, marks.exp_end - marks.max_sub_end,
                       marks.sum_scale_end - marks.exp_end, t1 - t0});
  }
  return timings;
}

TickSummary summarize(std::span<const Ticks> samples) {
  if (samples.empty()) throw ArgumentError("summarize: no samples");
  std::vector<Ticks> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  const Ticks median = sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
  return {median, sorted.front()};
}

// ---------------------------------------------------------------------------
// Reports

ProfileReport build_report(std::span<const EventSamples> events, double ticks_per_second) {
  if (events.empty()) throw ArgumentError("build_report: no events");
  if (!(ticks_per_second > 0)) throw ArgumentError("build_report: ticks_per_second must be > 0");

  ProfileReport report;
  report.ticks_per_second = ticks_per_second;
  double grand_total = 0;
  for (const auto& e : events) {
    if (e.samples.empty()) throw ArgumentError("build_report: event '" + e.name + "' has no samples");
    if (e.name.empty() || e.name.find_first_of(" \t\r\n") != std::string::npos) {
      throw ArgumentError("build_report: event names must be non-empty without whitespace");
    }
    EventStats s;
    s.name = e.name;
    s.calls = e.samples.size();
    s.min = static_cast<double>(*std::min_element(e.samples.begin(), e.samples.end()));
    s.max = static_cast<double>(*std::max_element(e.samples.begin(), e.samples.end()));
    for (Ticks t : e.samples) s.total += static_cast<double>(t);
    s.ave = s.total / static_cast<double>(s.calls);
    grand_total += s.total;
    report.events.push_back(std::move(s));
  }
  for (auto& s : report.events) {
    s.ratio = grand_total > 0 ? s.total / grand_total : 1.0 / static_cast<double>(events.size());
  }
  std::stable_sort(report.events.begin(), report.events.end(),
                   [](const EventStats& a, const EventStats& b) { return a.total > b.total; });
  return report;
}

std::string format_report(const ProfileReport& report) {
  std::size_t name_width = std::string_view("Event").size();
  for (const auto& e : report.events) name_width = std::max(name_width, e.name.size());
  name_width += 2;

  auto row = [&](std::string_view name, const std::array<std::string, 6>& cells) {
    std::string line(name);
    std::size_t column = name_width;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      pad_to(line, column);
      line += cells[i];
      if (i < kColumnWidths.size()) column = line.size() - cells[i].size() + kColumnWidths[i];
    }
    return line + "\n";
  };

  std::string out;
  out += kBanner;
  out += "\n\nPlace: CPU\nTime unit: ms\n";
  out += kSortLine;
  out += "\n\n";
  std::array<std::string, 6> header;
  std::copy(kNumericHeaders.begin(), kNumericHeaders.end(), header.begin());
  out += row("Event", header);
  const double tps = report.ticks_per_second;
  for (const auto& e : report.events) {
    out += row(e.name, {std::to_string(e.calls), ms_field(e.total, tps), ms_field(e.min, tps),
                        ms_field(e.max, tps), ms_field(e.ave, tps), ratio_field(e.ratio)});
  }
  return out;
}

std::string format_report_csv(const ProfileReport& report) {
  std::string out = "event,calls,total_ms,min_ms,max_ms,ave_ms,ratio\n";
  const double to_ms = 1e3 / report.ticks_per_second;
  char buf[256];
  for (const auto& e : report.events) {
    std::snprintf(buf, sizeof buf, "%s,%llu,%.9g,%.9g,%.9g,%.9g,%.6f\n", e.name.c_str(),
                  static_cast<unsigned long long>(e.calls), e.total * to_ms, e.min * to_ms,
                  e.max * to_ms, e.ave * to_ms, e.ratio);
    out += buf;
  }
  return out;
}

ProfileReport parse_report(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  bool in_table = false;
  bool saw_banner = false;
  ProfileReport report;
  report.ticks_per_second = 1000.0;
  while (std::getline(in, line)) {
    if (line == kBanner) {
      saw_banner = true;
      continue;
    }
    if (!in_table) {
      in_table = line.rfind("Event ", 0) == 0;
      continue;
    }
    if (line.empty()) break;
    std::istringstream fields(line);
    EventStats e;
    if (!(fields >> e.name >> e.calls >> e.total >> e.min >> e.max >> e.ave >> e.ratio)) {
      throw ArgumentError("parse_report: malformed row: " + line);
    }
    report.events.push_back(std::move(e));
  }
  if (!saw_banner || !in_table) throw ArgumentError("parse_report: not a profiling report");
  return report;
}

}  // namespace softmax_kit
