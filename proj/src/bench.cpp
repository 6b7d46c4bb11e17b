#include "softmax_kit/bench.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <string_view>

#include <json.hpp>

#include "softmax_kit/errors.hpp"

namespace softmax_kit {

namespace {

using nlohmann::ordered_json;

std::string printf_string(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::string shape_string(std::size_t batch, std::size_t cols) {
  return std::to_string(batch) + "x" + std::to_string(cols);
}

std::vector<std::size_t> sorted_batches(const BenchConfig& cfg) {
  auto b = cfg.batch_sizes;
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

Ticks time_whole_op(const Matrix2D& in, Matrix2D& out, KernelVariant v) {
  const Ticks t0 = now();
  softmax_into_unchecked(in, out, v);
  return now() - t0;
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

ordered_json accuracy_json(const std::optional<Accuracy>& a, const char* field) {
  if (!a) return nullptr;
  const double v = std::string_view(field) == "rowsum" ? a->max_rowsum_dev : a->max_elem_relerr;
  if (!std::isfinite(v)) return "inf";
  return v;
}

std::string accuracy_cell(const std::optional<Accuracy>& a, bool rowsum) {
  if (!a) return "";
  return printf_string("%.3e", rowsum ? a->max_rowsum_dev : a->max_elem_relerr);
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view name) noexcept {
  if (name == "text") return OutputFormat::Text;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  return std::nullopt;
}

void validate(const BenchConfig& cfg) {
  if (cfg.batch_sizes.empty()) throw ArgumentError("at least one batch size is required");
  for (std::size_t b : cfg.batch_sizes) {
    if (b == 0) throw ArgumentError("batch sizes must be >= 1");
  }
  if (cfg.num_classes == 0) throw ArgumentError("num-classes must be >= 1");
  if (cfg.variants.empty()) throw ArgumentError("at least one variant is required");
  if (cfg.reps == 0) throw ArgumentError("reps must be >= 1");
  if (!std::isfinite(cfg.low) || !std::isfinite(cfg.high) || !(cfg.low < cfg.high)) {
    throw ArgumentError("fill range requires finite low < high");
  }
  if (std::find(cfg.variants.begin(), cfg.variants.end(), cfg.baseline) == cfg.variants.end()) {
    throw ArgumentError("baseline '" + std::string(variant_name(cfg.baseline)) +
                        "' is not among the selected variants");
  }
}

std::vector<KernelVariant> ladder_order(const std::vector<KernelVariant>& variants) {
  std::vector<KernelVariant> out;
  for (KernelVariant v : kAllVariants) {
    if (std::find(variants.begin(), variants.end(), v) != variants.end()) out.push_back(v);
  }
  return out;
}

Matrix2D make_input(const BenchConfig& cfg, std::size_t batch) {
  Matrix2D m(batch, cfg.num_classes);
  fill_uniform(m, {cfg.seed, cfg.low, cfg.high});
  return m;
}

std::uint64_t input_hash(const Matrix2D& m) {
  const auto bytes = std::as_bytes(m.data());
  const std::string_view view(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return std::hash<std::string_view>{}(view) ^ (m.rows() * 0x9E3779B97F4A7C15ull) ^ m.cols();
}

Accuracy measure_accuracy(const Matrix2D& in, const Matrix2D& out) {
  if (in.rows() != out.rows() || in.cols() != out.cols()) {
    throw ArgumentError("measure_accuracy: shape mismatch");
  }
  Accuracy acc;
  std::vector<long double> exact(in.cols());
  for (std::size_t n = 0; n < in.rows(); ++n) {
    const auto z = in.row(n);
    const auto y = out.row(n);
    const long double m = *std::max_element(z.begin(), z.end());
    long double denom = 0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      exact[c] = std::exp(static_cast<long double>(z[c]) - m);
      denom += exact[c];
    }
    long double row_sum = 0;
    for (std::size_t c = 0; c < z.size(); ++c) {
      if (!std::isfinite(y[c]) || y[c] < 0.0f) {
        if (acc.finite) acc.worst_row = n;
        acc.finite = false;
        acc.max_rowsum_dev = acc.max_elem_relerr = std::numeric_limits<double>::infinity();
        return acc;
      }
      row_sum += y[c];
      const long double p = exact[c] / denom;
      if (p >= FLT_MIN) {
        const double rel = static_cast<double>(std::fabs(static_cast<long double>(y[c]) - p) / p);
        if (rel > acc.max_elem_relerr) {
          acc.max_elem_relerr = rel;
          acc.worst_row = n;
        }
      }
    }
    acc.max_rowsum_dev = std::max(acc.max_rowsum_dev, static_cast<double>(std::fabs(row_sum - 1)));
  }
  return acc;
}

bool within_tolerance(const Accuracy& a, KernelVariant v) noexcept {
  return a.finite && a.max_elem_relerr <= element_tolerance(v) &&
         a.max_rowsum_dev <= kRowSumTolerance;
}

// ---------------------------------------------------------------------------

VerifySummary run_verify(const BenchConfig& cfg) {
  validate(cfg);
  VerifySummary summary;
  for (std::size_t batch : sorted_batches(cfg)) {
    const Matrix2D in = make_input(cfg, batch);
    Matrix2D out(in.rows(), in.cols());
    for (KernelVariant v : ladder_order(cfg.variants)) {
      if (cfg.inject_skip_shift) {
        testing::softmax_into_without_shift(in, out, v);
      } else {
        softmax_into(in, out, v);
      }
      VerifyRow row{v, batch, cfg.num_classes, measure_accuracy(in, out), false};
      row.pass = within_tolerance(row.accuracy, v);
      summary.all_pass = summary.all_pass && row.pass;
      summary.rows.push_back(row);
    }
  }
  // Ladder order first, batches ascending within a variant.
  std::stable_sort(summary.rows.begin(), summary.rows.end(),
                   [](const VerifyRow& a, const VerifyRow& b) { return a.variant < b.variant; });
  return summary;
}

SweepResult run_bench(const BenchConfig& cfg) {
  validate(cfg);
  const auto variants = ladder_order(cfg.variants);
  const auto batches = sorted_batches(cfg);

  SweepResult sweep;
  std::vector<SweepRow> copy_rows;
  std::vector<std::vector<SweepRow>> per_variant(variants.size());
  for (std::size_t batch : batches) {
    const Matrix2D in = make_input(cfg, batch);
    check_finite(in);
    const std::uint64_t hash = input_hash(in);
    Matrix2D out(in.rows(), in.cols());
    std::vector<Ticks> samples(cfg.reps);

    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      const KernelVariant v = variants[vi];
      for (std::size_t i = 0; i < cfg.warmup; ++i) softmax_into_unchecked(in, out, v);
      for (auto& s : samples) s = time_whole_op(in, out, v);
      const auto summary = summarize(samples);
      per_variant[vi].push_back({std::string(variant_name(v)), batch, cfg.num_classes,
                                 summary.median, summary.min, 0.0, measure_accuracy(in, out),
                                 hash});
    }

    std::size_t copy_reps = std::max<std::size_t>(cfg.reps, 3);
    samples.resize(copy_reps);
    const std::size_t bytes = in.size() * sizeof(float);
    for (std::size_t i = 0; i < cfg.warmup; ++i) std::memcpy(out.data().data(), in.data().data(), bytes);
    for (auto& s : samples) {
      const Ticks t0 = now();
      std::memcpy(out.data().data(), in.data().data(), bytes);
      s = now() - t0;
    }
    const auto summary = summarize(samples);
    copy_rows.push_back({std::string(kCopyRowName), batch, cfg.num_classes, summary.median,
                         summary.min, 0.0, std::nullopt, hash});
  }

  for (auto& rows : per_variant) sweep.rows.insert(sweep.rows.end(), rows.begin(), rows.end());
  sweep.rows.insert(sweep.rows.end(), copy_rows.begin(), copy_rows.end());

  const std::string baseline(variant_name(cfg.baseline));
  for (auto& row : sweep.rows) {
    const auto base = std::find_if(sweep.rows.begin(), sweep.rows.end(), [&](const SweepRow& r) {
      return r.variant == baseline && r.batch == row.batch;
    });
    const double denom = static_cast<double>(std::max<Ticks>(base->median_ticks, 1));
    row.pct_of_baseline = 100.0 * static_cast<double>(std::max<Ticks>(row.median_ticks, 1)) / denom;
  }
  return sweep;
}

std::vector<std::string> bench_expectations(const SweepResult& sweep, const BenchConfig& cfg) {
  constexpr double kOptimizedPctLimit = 70.0;
  std::vector<std::string> lines;
  const std::string full(variant_name(KernelVariant::FullVectorized));
  const std::string base(variant_name(cfg.baseline));
  for (const auto& row : sweep.rows) {
    if (row.variant != full) continue;
    const bool ok = row.pct_of_baseline <= kOptimizedPctLimit;
    lines.push_back(printf_string("[%s] %s batch %zu: %.1f%% of %s (expected <= %.0f%%)",
                                  ok ? "PASS" : "WARN", full.c_str(), row.batch,
                                  row.pct_of_baseline, base.c_str(), kOptimizedPctLimit));
    for (const auto& copy : sweep.rows) {
      if (copy.variant != kCopyRowName || copy.batch != row.batch) continue;
      const bool below = copy.pct_of_baseline < row.pct_of_baseline;
      lines.push_back(printf_string("[%s] memcpy batch %zu: %.2f%% of %s, %s %s's %.1f%%",
                                    below ? "PASS" : "WARN", copy.batch, copy.pct_of_baseline,
                                    base.c_str(), below ? "below" : "NOT below", full.c_str(),
                                    row.pct_of_baseline));
    }
  }
  return lines;
}

std::vector<ProfileTable> run_profile(const BenchConfig& cfg) {
  validate(cfg);
  std::vector<ProfileTable> tables;
  const double tps = Timer::global().ticks_per_second();
  for (KernelVariant v : ladder_order(cfg.variants)) {
    for (std::size_t batch : sorted_batches(cfg)) {
      const Matrix2D in = make_input(cfg, batch);
      const auto timings = time_phases(in, v, cfg.reps, cfg.warmup);
      std::vector<EventSamples> events;
      for (PhaseId id : kAllPhases) {
        EventSamples e{std::string(phase_name(id)), {}};
        for (const auto& t : timings) e.samples.push_back(t[id]);
        events.push_back(std::move(e));
      }
      std::vector<double> exp_share, sum_share;
      for (const auto& t : timings) {
        const double whole = static_cast<double>(std::max<Ticks>(t.whole_op, 1));
        exp_share.push_back(static_cast<double>(t.exp) / whole);
        sum_share.push_back(static_cast<double>(t.sum_scale) / whole);
      }
      tables.push_back({v, batch, cfg.num_classes, build_report(events, tps),
                        median_of(exp_share), median_of(sum_share)});
    }
  }
  return tables;
}

std::vector<ProbeRow> run_probe(const BenchConfig& cfg) {
  validate(cfg);
  const std::size_t reps = std::max<std::size_t>(cfg.reps, 3);
  const auto batches = sorted_batches(cfg);
  std::vector<ProbeRow> rows;
  for (KernelVariant v : ladder_order(cfg.variants)) {
    for (std::size_t batch : batches) {
      const Matrix2D in = make_input(cfg, batch);
      rows.push_back({std::string(variant_name(v)), batch, cfg.num_classes,
                      probe(in, v, reps, cfg.warmup)});
    }
  }
  const Matrix2D in = make_input(cfg, batches.back());
  rows.push_back({std::string(kCopyRowName), batches.back(), cfg.num_classes,
                  probe(in, std::nullopt, reps, cfg.warmup)});
  return rows;
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_verify(const VerifySummary& summary, OutputFormat format) {
  std::string out;
  if (format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : summary.rows) {
      arr.push_back({{"variant", variant_name(r.variant)},
                     {"batch", r.batch},
                     {"cols", r.cols},
                     {"max_rowsum_dev", accuracy_json(r.accuracy, "rowsum")},
                     {"max_elem_relerr", accuracy_json(r.accuracy, "relerr")},
                     {"tolerance", element_tolerance(r.variant)},
                     {"worst_row", r.accuracy.worst_row},
                     {"status", r.pass ? "PASS" : "FAIL"}});
    }
    return arr.dump(2) + "\n";
  }
  if (format == OutputFormat::Csv) {
    out = "variant,batch,cols,max_rowsum_dev,max_elem_relerr,tolerance,worst_row,status\n";
    for (const auto& r : summary.rows) {
      out += printf_string("%s,%zu,%zu,%s,%s,%.0e,%zu,%s\n", variant_name(r.variant).data(),
                           r.batch, r.cols, accuracy_cell(r.accuracy, true).c_str(),
                           accuracy_cell(r.accuracy, false).c_str(),
                           element_tolerance(r.variant), r.accuracy.worst_row,
                           r.pass ? "PASS" : "FAIL");
    }
    return out;
  }
  for (const auto& r : summary.rows) {
    out += printf_string("[%s] %-28s batch %-4zu max_elem_relerr %.3e (tol %.0e)  "
                         "max_rowsum_dev %.3e (tol %.0e)",
                         r.pass ? "PASS" : "FAIL", variant_name(r.variant).data(), r.batch,
                         r.accuracy.max_elem_relerr, element_tolerance(r.variant),
                         r.accuracy.max_rowsum_dev, kRowSumTolerance);
    if (!r.pass) {
      out += printf_string("  offending row %zu%s", r.accuracy.worst_row,
                           r.accuracy.finite ? "" : " (non-finite output)");
    }
    out += "\n";
  }
  out += summary.all_pass ? "verify: all variants within tolerance\n"
                          : "verify: correctness FAILURE\n";
  return out;
}

std::string format_bench(const SweepResult& sweep, OutputFormat format) {
  if (format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : sweep.rows) {
      arr.push_back({{"variant", r.variant},
                     {"batch", r.batch},
                     {"cols", r.cols},
                     {"median_ticks", r.median_ticks},
                     {"min_ticks", r.min_ticks},
                     {"pct_of_baseline", r.pct_of_baseline},
                     {"max_rowsum_dev", accuracy_json(r.accuracy, "rowsum")},
                     {"max_elem_relerr", accuracy_json(r.accuracy, "relerr")}});
    }
    return arr.dump(2) + "\n";
  }
  std::string out;
  if (format == OutputFormat::Csv) {
    out = "variant,batch,cols,median_ticks,min_ticks,pct_of_baseline,max_rowsum_dev,"
          "max_elem_relerr\n";
    for (const auto& r : sweep.rows) {
      out += printf_string("%s,%zu,%zu,%llu,%llu,%.3f,%s,%s\n", r.variant.c_str(), r.batch,
                           r.cols, static_cast<unsigned long long>(r.median_ticks),
                           static_cast<unsigned long long>(r.min_ticks), r.pct_of_baseline,
                           accuracy_cell(r.accuracy, true).c_str(),
                           accuracy_cell(r.accuracy, false).c_str());
    }
    return out;
  }
  out = printf_string("%-28s %6s %6s %14s %14s %16s %15s %16s\n", "variant", "batch", "cols",
                      "median_ticks", "min_ticks", "pct_of_baseline", "max_rowsum_dev",
                      "max_elem_relerr");
  for (const auto& r : sweep.rows) {
    out += printf_string("%-28s %6zu %6zu %14llu %14llu %16.2f %15s %16s\n", r.variant.c_str(),
                         r.batch, r.cols, static_cast<unsigned long long>(r.median_ticks),
                         static_cast<unsigned long long>(r.min_ticks), r.pct_of_baseline,
                         accuracy_cell(r.accuracy, true).c_str(),
                         accuracy_cell(r.accuracy, false).c_str());
  }
  return out;
}

std::string format_profile(const std::vector<ProfileTable>& tables, OutputFormat format) {
  if (format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& t : tables) {
      const double to_ms = 1e3 / t.report.ticks_per_second;
      for (const auto& e : t.report.events) {
        arr.push_back({{"variant", variant_name(t.variant)},
                       {"batch", t.batch},
                       {"cols", t.cols},
                       {"event", e.name},
                       {"calls", e.calls},
                       {"total_ms", e.total * to_ms},
                       {"min_ms", e.min * to_ms},
                       {"max_ms", e.max * to_ms},
                       {"ave_ms", e.ave * to_ms},
                       {"ratio", e.ratio}});
      }
    }
    return arr.dump(2) + "\n";
  }
  std::string out;
  if (format == OutputFormat::Csv) {
    out = "variant,batch,cols,event,calls,total_ms,min_ms,max_ms,ave_ms,ratio\n";
    for (const auto& t : tables) {
      const std::string csv = format_report_csv(t.report);
      const std::string prefix = printf_string("%s,%zu,%zu,", variant_name(t.variant).data(),
                                               t.batch, t.cols);
      std::size_t pos = csv.find('\n') + 1;  // skip header
      while (pos < csv.size()) {
        const std::size_t end = csv.find('\n', pos);
        out += prefix + csv.substr(pos, end - pos + 1);
        pos = end + 1;
      }
    }
    return out;
  }
  for (const auto& t : tables) {
    out += printf_string("== %s  batch=%zu  cols=%zu ==\n", variant_name(t.variant).data(),
                         t.batch, t.cols);
    out += format_report(t.report);
    out += printf_string("Exp share of WholeOp (median per rep): %.3f\n", t.exp_share);
    out += printf_string("SumScale share of WholeOp (median per rep): %.3f\n\n",
                         t.sum_scale_share);
  }
  return out;
}

std::string format_probe(const std::vector<ProbeRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Json) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows) {
      arr.push_back({{"shape", shape_string(r.batch, r.cols)},
                     {"variant", r.subject},
                     {"kernel_ticks", r.result.kernel_ticks},
                     {"copy_ticks", r.result.copy_ticks},
                     {"ratio", r.result.ratio},
                     {"verdict", verdict_name(r.result.verdict)}});
    }
    return arr.dump(2) + "\n";
  }
  std::string out;
  if (format == OutputFormat::Csv) {
    out = "shape,variant,kernel_ticks,copy_ticks,ratio,verdict\n";
    for (const auto& r : rows) {
      out += printf_string("%s,%s,%llu,%llu,%.4f,%s\n", shape_string(r.batch, r.cols).c_str(),
                           r.subject.c_str(), static_cast<unsigned long long>(r.result.kernel_ticks),
                           static_cast<unsigned long long>(r.result.copy_ticks), r.result.ratio,
                           verdict_name(r.result.verdict).data());
    }
    return out;
  }
  out = printf_string("%-10s %-28s %14s %12s %10s  %s\n", "shape", "variant", "kernel_ticks",
                      "copy_ticks", "ratio", "verdict");
  for (const auto& r : rows) {
    out += printf_string("%-10s %-28s %14llu %12llu %10.3f  %s\n",
                         shape_string(r.batch, r.cols).c_str(), r.subject.c_str(),
                         static_cast<unsigned long long>(r.result.kernel_ticks),
                         static_cast<unsigned long long>(r.result.copy_ticks), r.result.ratio,
                         verdict_name(r.result.verdict).data());
  }
  return out;
}

}  // namespace softmax_kit
