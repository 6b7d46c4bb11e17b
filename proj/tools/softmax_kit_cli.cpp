// softmax_kit: verify, bench, profile and probe the softmax variant ladder.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "softmax_kit/bench.hpp"
#include "softmax_kit/errors.hpp"

namespace sk = softmax_kit;

namespace {

enum Exit { kOk = 0, kCorrectnessFailure = 1, kUsageError = 2 };

// Measurements are single-threaded; refuse to run under any other setting.
bool thread_contract_ok() {
  const char* v = std::getenv("SOFTMAX_KIT_THREADS");
  if (v == nullptr || std::string(v) == "1") return true;
  std::fprintf(stderr,
               "softmax_kit: SOFTMAX_KIT_THREADS=%s is not supported; "
               "only single-threaded runs (unset or 1) are allowed\n",
               v);
  return false;
}

struct Args {
  std::vector<std::size_t> batches;
  std::vector<std::string> variants;
  std::string format = "text";
  std::string baseline;
  sk::BenchConfig cfg;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--batch-size", a.batches, "Batch size (repeatable)");
  cmd->add_option("--num-classes", a.cfg.num_classes, "Row width")->capture_default_str();
  cmd->add_option("--variant", a.variants, "Variant name (repeatable; default all)");
  cmd->add_option("--reps", a.cfg.reps, "Timed repetitions")->capture_default_str();
  cmd->add_option("--warmup", a.cfg.warmup, "Untimed warmup runs")->capture_default_str();
  cmd->add_option("--seed", a.cfg.seed, "Input seed")->capture_default_str();
  cmd->add_option("--low", a.cfg.low, "Fill range low")->capture_default_str();
  cmd->add_option("--high", a.cfg.high, "Fill range high")->capture_default_str();
  cmd->add_option("--format", a.format, "text, csv or json")->capture_default_str();
  cmd->add_option("--baseline", a.baseline, "Baseline variant (default reference_clipped)");
}

// Fills cfg from the raw strings; throws ArgumentError on unknown names.
void resolve(Args& a) {
  if (!a.batches.empty()) a.cfg.batch_sizes = a.batches;
  if (!a.variants.empty()) {
    a.cfg.variants.clear();
    for (const auto& name : a.variants) {
      const auto v = sk::parse_variant(name);
      if (!v) throw sk::ArgumentError("unknown variant '" + name + "'");
      a.cfg.variants.push_back(*v);
    }
  }
  if (!a.baseline.empty()) {
    const auto v = sk::parse_variant(a.baseline);
    if (!v) throw sk::ArgumentError("unknown baseline '" + a.baseline + "'");
    a.cfg.baseline = *v;
  } else if (!a.variants.empty()) {
    // Default baseline falls back to the first selected rung.
    const auto order = sk::ladder_order(a.cfg.variants);
    if (std::find(order.begin(), order.end(), a.cfg.baseline) == order.end()) {
      a.cfg.baseline = order.front();
    }
  }
  const auto fmt = sk::parse_format(a.format);
  if (!fmt) throw sk::ArgumentError("unknown format '" + a.format + "'");
  a.cfg.format = *fmt;
  sk::validate(a.cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Softmax optimization workbench"};
  app.require_subcommand(1);
  Args args;
  bool skip_shift = false;

  auto* verify = app.add_subcommand("verify", "Check every variant against the oracle");
  auto* bench = app.add_subcommand("bench", "Time the variant sweep");
  auto* profile = app.add_subcommand("profile", "Per-phase profile tables");
  auto* probe = app.add_subcommand("probe", "Memory- vs compute-bound probe");
  for (auto* cmd : {verify, bench, profile, probe}) add_common(cmd, args);
  verify->add_flag("--inject-skip-shift", skip_shift)->group("");  // test hook

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }
  if (!thread_contract_ok()) return kUsageError;

  try {
    resolve(args);
  } catch (const sk::ArgumentError& e) {
    std::fprintf(stderr, "softmax_kit: %s\n", e.what());
    return kUsageError;
  }
  sk::BenchConfig& cfg = args.cfg;
  cfg.inject_skip_shift = skip_shift;
  const bool text = cfg.format == sk::OutputFormat::Text;

  try {
    if (verify->parsed()) {
      const auto summary = sk::run_verify(cfg);
      std::cout << sk::format_verify(summary, cfg.format);
      if (!summary.all_pass) {
        for (const auto& r : summary.rows) {
          if (r.pass) continue;
          std::fprintf(stderr, "softmax_kit: %s exceeds tolerance at batch %zu, row %zu\n",
                       sk::variant_name(r.variant).data(), r.batch, r.accuracy.worst_row);
        }
        return kCorrectnessFailure;
      }
    } else if (bench->parsed()) {
      const auto sweep = sk::run_bench(cfg);
      std::cout << sk::format_bench(sweep, cfg.format);
      for (const auto& line : sk::bench_expectations(sweep, cfg)) {
        (text ? std::cout : std::cerr) << line << '\n';
      }
      bool ok = true;
      for (const auto& r : sweep.rows) {
        if (r.accuracy && !sk::within_tolerance(*r.accuracy, *sk::parse_variant(r.variant))) {
          std::fprintf(stderr, "softmax_kit: %s exceeds tolerance at batch %zu, row %zu\n",
                       r.variant.c_str(), r.batch, r.accuracy->worst_row);
          ok = false;
        }
      }
      if (!ok) return kCorrectnessFailure;
    } else if (profile->parsed()) {
      std::cout << sk::format_profile(sk::run_profile(cfg), cfg.format);
    } else if (probe->parsed()) {
      std::cout << sk::format_probe(sk::run_probe(cfg), cfg.format);
    }
  } catch (const sk::ArgumentError& e) {
    std::fprintf(stderr, "softmax_kit: %s\n", e.what());
    return kUsageError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "softmax_kit: %s\n", e.what());
    return kCorrectnessFailure;
  }
  return kOk;
}
