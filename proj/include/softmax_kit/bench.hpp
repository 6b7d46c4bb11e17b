#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "softmax_kit/bound_probe.hpp"
#include "softmax_kit/kernels.hpp"
#include "softmax_kit/profiler.hpp"
#include "softmax_kit/tensor.hpp"

namespace softmax_kit {

enum class OutputFormat { Text, Csv, Json };

std::optional<OutputFormat> parse_format(std::string_view name) noexcept;

struct BenchConfig {
  std::vector<std::size_t> batch_sizes{1, 8, 32, 128};
  std::size_t num_classes = 1000;
  std::vector<KernelVariant> variants{kAllVariants.begin(), kAllVariants.end()};
  std::size_t reps = 100;
  std::size_t warmup = 10;
  std::uint64_t seed = 42;
  float low = -5.0f;
  float high = 5.0f;
  OutputFormat format = OutputFormat::Text;
  KernelVariant baseline = KernelVariant::ReferenceClipped;
  /// Test hook: run every variant with the max shift skipped.
  bool inject_skip_shift = false;
};

/// Throws ArgumentError on an empty or zero batch list, zero classes or reps,
/// an invalid fill range, or a baseline missing from the variant list.
void validate(const BenchConfig& cfg);

/// Variants deduplicated and put in ladder order.
std::vector<KernelVariant> ladder_order(const std::vector<KernelVariant>& variants);

/// The sweep input for one batch size; identical for every variant.
Matrix2D make_input(const BenchConfig& cfg, std::size_t batch);

/// Hash of a matrix's shape and bytes.
std::uint64_t input_hash(const Matrix2D& m);

// ---------------------------------------------------------------------------
// Correctness against an extended-precision (long double) softmax

inline constexpr double kExactExpTolerance = 1e-6;
inline constexpr double kApproxExpTolerance = 1e-5;
inline constexpr double kRowSumTolerance = 1e-5;

constexpr double element_tolerance(KernelVariant v) noexcept {
  return uses_exact_exp(v) ? kExactExpTolerance : kApproxExpTolerance;
}

struct Accuracy {
  double max_rowsum_dev = 0;   // max |sum(row) - 1|
  double max_elem_relerr = 0;  // over elements whose exact value is a normal float
  std::size_t worst_row = 0;   // row holding max_elem_relerr (or the first non-finite value)
  bool finite = true;          // every output element finite and non-negative
};

/// Compares out = softmax(in) against the long double oracle. Elements whose
/// exact probability is below FLT_MIN are excluded from the relative error.
Accuracy measure_accuracy(const Matrix2D& in, const Matrix2D& out);

bool within_tolerance(const Accuracy& a, KernelVariant v) noexcept;

// ---------------------------------------------------------------------------
// Subcommands

struct VerifyRow {
  KernelVariant variant;
  std::size_t batch = 0;
  std::size_t cols = 0;
  Accuracy accuracy;
  bool pass = false;
};

struct VerifySummary {
  std::vector<VerifyRow> rows;
  bool all_pass = true;
};

VerifySummary run_verify(const BenchConfig& cfg);

/// Row name used for the copy baseline in bench and probe output.
inline constexpr std::string_view kCopyRowName = "memcpy";

struct SweepRow {
  std::string variant;  // variant name or kCopyRowName
  std::size_t batch = 0;
  std::size_t cols = 0;
  Ticks median_ticks = 0;
  Ticks min_ticks = 0;
  double pct_of_baseline = 0;
  std::optional<Accuracy> accuracy;  // empty for the copy row
  std::uint64_t input_hash = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ladder order, then the copy row; batches ascending within each
};

SweepResult run_bench(const BenchConfig& cfg);

/// PASS/WARN lines for the hardware-dependent speed expectations.
std::vector<std::string> bench_expectations(const SweepResult& sweep, const BenchConfig& cfg);

struct ProfileTable {
  KernelVariant variant;
  std::size_t batch = 0;
  std::size_t cols = 0;
  ProfileReport report;
  double exp_share = 0;        // median over reps of Exp / WholeOp
  double sum_scale_share = 0;  // median over reps of SumScale / WholeOp
};

std::vector<ProfileTable> run_profile(const BenchConfig& cfg);

struct ProbeRow {
  std::string subject;  // variant name or kCopyRowName for the self-probe
  std::size_t batch = 0;
  std::size_t cols = 0;
  BoundProbeResult result;
};

/// One row per variant x batch, then a copy self-probe at the largest batch.
std::vector<ProbeRow> run_probe(const BenchConfig& cfg);

std::string format_verify(const VerifySummary& summary, OutputFormat format);
std::string format_bench(const SweepResult& sweep, OutputFormat format);
std::string format_profile(const std::vector<ProfileTable>& tables, OutputFormat format);
std::string format_probe(const std::vector<ProbeRow>& rows, OutputFormat format);

}  // namespace softmax_kit
