#include <doctest.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "softmax_kit/errors.hpp"
#include "softmax_kit/profiler.hpp"
#include "support/report_fixture.hpp"
#include "support/oracle.hpp"

using namespace softmax_kit;

TEST_CASE("now is monotone and calibrated") {
  const Timer& t = Timer::global();
  MESSAGE("timer source: ", t.source_name(), ", ticks/s: ", t.ticks_per_second());
  CHECK(t.ticks_per_second() > 1e6);
  Ticks prev = now();
  for (int i = 0; i < 100000; ++i) {
    const Ticks cur = now();
    REQUIRE(cur >= prev);
    prev = cur;
  }
  const Ticks a = now();
  std::this_thread::sleep_for(std::chrono::milliseconds(10));
  const double s = t.seconds(now() - a);
  CHECK(s >= 0.008);
  CHECK(s <= 0.1);
}

TEST_CASE("both timer sources work") {
  Timer steady(Timer::Source::Steady);
  CHECK(steady.ticks_per_second() == 1e9);
  CHECK(steady.source_name() == "steady_clock");
  if (Timer::tsc_available()) {
    Timer tsc(Timer::Source::Tsc);
    CHECK(tsc.ticks_per_second() > 1e8);
  } else {
    CHECK_THROWS_AS(Timer(Timer::Source::Tsc), ArgumentError);
  }
}

TEST_CASE("summarize") {
  const std::vector<Ticks> odd{5, 1, 9}, even{4, 1, 3, 10};
  CHECK(summarize(odd).median == 5);
  CHECK(summarize(odd).min == 1);
  CHECK(summarize(even).median == 3);  // (3 + 4) / 2 in integer ticks
  CHECK(summarize(even).min == 1);
  CHECK_THROWS_AS(summarize({}), ArgumentError);
}

TEST_CASE("time_phases contract") {
  Matrix2D m(8, 600);
  fill_uniform(m, {1});
  for (KernelVariant v : kAllVariants) {
    const auto t = time_phases(m, v, 5, 2);
    REQUIRE(t.size() == 5);
    for (const auto& p : t) {
      CHECK(p.max_sub + p.exp + p.sum_scale <= p.whole_op);
      CHECK(p[PhaseId::Exp] == p.exp);
      CHECK(p[PhaseId::WholeOp] == p.whole_op);
    }
  }
  CHECK_THROWS_AS(time_phases(m, KernelVariant::FullVectorized, 0), ArgumentError);
  m(3, 3) = NAN;
  CHECK_THROWS_AS(time_phases(m, KernelVariant::FullVectorized, 1), NumericDomainError);
}

TEST_CASE("instrumentation overhead stays below 10%") {
  Matrix2D m(32, 1000);
  fill_uniform(m, {2});
  const auto t = time_phases(m, KernelVariant::MklStyleScalar, 31);
  std::vector<Ticks> parts, whole;
  for (const auto& p : t) {
    parts.push_back(p.max_sub + p.exp + p.sum_scale);
    whole.push_back(p.whole_op);
  }
  CHECK(static_cast<double>(summarize(parts).median) >= 0.9 * summarize(whole).median);
}

TEST_CASE("build_report arithmetic") {
  const std::vector<EventSamples> one{{"a", {10, 20, 30}}};
  const auto r = build_report(one, 1000);
  REQUIRE(r.events.size() == 1);
  const auto& e = r.events[0];
  CHECK(e.calls == 3);
  CHECK(e.total == 60);
  CHECK(e.min == 10);
  CHECK(e.max == 30);
  CHECK(e.ave == 20);
  CHECK(e.ratio == 1.0);

  const std::vector<EventSamples> two{{"small", {40}}, {"big", {30, 30}}};
  const auto r2 = build_report(two, 1000);
  CHECK(r2.events[0].name == "big");
  CHECK(r2.events[0].ratio == doctest::Approx(0.6));
  CHECK(r2.events[1].ratio == doctest::Approx(0.4));

  // Equal totals keep input order.
  const std::vector<EventSamples> tie{{"x", {5}}, {"y", {5}}};
  CHECK(build_report(tie, 1000).events[0].name == "x");
}

TEST_CASE("build_report rejects bad input") {
  CHECK_THROWS_AS(build_report({}, 1000), ArgumentError);
  const std::vector<EventSamples> empty{{"a", {}}};
  CHECK_THROWS_AS(build_report(empty, 1000), ArgumentError);
  const std::vector<EventSamples> spaced{{"two words", {1}}};
  CHECK_THROWS_AS(build_report(spaced, 1000), ArgumentError);
}

TEST_CASE("report invariants over real timings") {
  Matrix2D m(16, 700);
  fill_uniform(m, {3});
  const auto t = time_phases(m, KernelVariant::VectorizedSum, 20);
  std::vector<EventSamples> ev;
  for (PhaseId id : kAllPhases) {
    EventSamples e{std::string(phase_name(id)), {}};
    for (const auto& p : t) e.samples.push_back(p[id]);
    ev.push_back(e);
  }
  const auto r = build_report(ev, Timer::global().ticks_per_second());
  double ratio_sum = 0;
  for (std::size_t i = 0; i < r.events.size(); ++i) {
    const auto& e = r.events[i];
    ratio_sum += e.ratio;
    CHECK(e.min <= e.ave);
    CHECK(e.ave <= e.max);
    CHECK(e.ave * e.calls == doctest::Approx(e.total));
    if (i) CHECK(r.events[i - 1].total >= e.total);
  }
  CHECK(std::fabs(ratio_sum - 1) <= 0.01);
  CHECK(r.events[0].name == "WholeOp");
}

TEST_CASE("format_report golden") {
  const std::string golden = read_file(SOFTMAX_KIT_GOLDEN_DIR "/operator_report.txt");
  REQUIRE_FALSE(golden.empty());
  CHECK(format_report(sample_operator_report()) == golden);
}

TEST_CASE("format_report small cases") {
  ProfileReport empty;
  const std::string head = format_report(empty);
  CHECK(head.find("Place: CPU\nTime unit: ms\n") != std::string::npos);
  CHECK(head.substr(head.rfind('\n', head.size() - 2) + 1).rfind("Event", 0) == 0);

  const std::vector<EventSamples> one{{"only", {1000, 3000}}};
  const std::string text = format_report(build_report(one, 1e6));
  const std::string last = text.substr(text.rfind('\n', text.size() - 2) + 1);
  CHECK(last == "only   2        4         1         3         2          1.000\n");
  CHECK(text.find(" \n") == std::string::npos);
}

TEST_CASE("format_report round-trips through parse_report") {
  const auto original = sample_operator_report();
  const auto parsed = parse_report(format_report(original));
  REQUIRE(parsed.events.size() == original.events.size());
  for (std::size_t i = 0; i < parsed.events.size(); ++i) {
    const auto& a = original.events[i];
    const auto& b = parsed.events[i];
    CHECK(a.name == b.name);
    CHECK(a.calls == b.calls);
    CHECK(a.total == b.total);
    CHECK(a.min == b.min);
    CHECK(a.max == b.max);
    CHECK(a.ave == b.ave);
    CHECK(a.ratio == b.ratio);
  }
  CHECK(format_report(parsed) == format_report(original));
  CHECK_THROWS_AS(parse_report("not a report"), ArgumentError);
}

TEST_CASE("format_report_csv") {
  const std::string csv = format_report_csv(sample_operator_report());
  CHECK(csv.rfind("event,calls,total_ms,min_ms,max_ms,ave_ms,ratio\n", 0) == 0);
  CHECK(csv.find("thread0::softmax,158000,32188.1,0.193633,0.882732,0.203722,0.185000\n") !=
        std::string::npos);
}
