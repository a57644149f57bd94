// adapta: generate field data, derive patient models, run the adaptive
// testing experiments and rebuild reports from run logs.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "adapta/cli.hpp"
#include "adapta/errors.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::filesystem::path output_dir(const std::string& flag) {
  if (const char* env = std::getenv("ADAPTA_OUT"); env && *env) return env;
  return flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-adaptive field testing of a body sensor network"};
  app.require_subcommand(1);

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Write a synthetic ICU field dataset");
  std::uint64_t gen_seed = 1;
  int gen_records = 13;
  int gen_samples = 1000;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--records", gen_records, "Number of patient records")->capture_default_str();
  gen->add_option("--samples", gen_samples, "Samples per sensor series")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  // derive
  auto* derive = app.add_subcommand("derive", "Derive per-profile DTMCs from field data");
  std::string derive_data;
  std::string derive_out;
  derive->add_option("--data", derive_data, "Directory with admissions.csv and series.csv")->required();
  derive->add_option("--model-out", derive_out, "Model file to write")->required();

  // run
  auto* run = app.add_subcommand("run", "Run the experiment repetitions and write logs and report");
  adapta::ExperimentSpec spec;
  std::vector<std::string> scenarios{"all"};
  std::string mode = "both";
  std::string model;
  std::string run_out = "out";
  double battery_rate = -1;
  bool no_stale_hold = false;
  run->add_option("--scenario", scenarios, "s1, s2, s3 or all (repeatable)")->capture_default_str();
  run->add_option("--mode", mode, "adaptive, baseline or both")
      ->check(CLI::IsMember({"adaptive", "baseline", "both"}))
      ->capture_default_str();
  run->add_option("--reps", spec.repetitions, "Repetitions per scenario and mode")->capture_default_str();
  run->add_option("--seed", spec.patient_seed, "Base patient seed")->capture_default_str();
  run->add_option("--sut-seed", spec.sut_seed, "Base BSN seed")->capture_default_str();
  run->add_option("--model", model, "Profile model file")->required();
  run->add_option("--out", run_out, "Output directory (ADAPTA_OUT overrides)")->capture_default_str();
  run->add_option("--duration", spec.duration, "Seconds per profile")->capture_default_str();
  run->add_option("--test-window", spec.test_window, "Periodic test window in seconds")->capture_default_str();
  run->add_option("--pause", spec.pause, "Pause between test windows in seconds")->capture_default_str();
  run->add_option("--battery-rate", battery_rate, "Battery drain per tick (default 0.65 for s1, 0.05 otherwise)");
  run->add_option("--misclassify-prob", spec.misclassify_prob, "BSN misclassification probability")
      ->capture_default_str();
  run->add_option("--threshold", spec.threshold, "Comparison threshold on outcome IDs")->capture_default_str();
  run->add_option("--jobs", spec.jobs, "Concurrent runs")->capture_default_str();
  run->add_flag("--no-stale-hold", no_stale_hold, "Drop readings of inactive sensors instead of holding them");

  // report
  auto* report = app.add_subcommand("report", "Rebuild the report from run logs");
  std::string report_logs;
  std::string report_out;
  report->add_option("--logs", report_logs, "Directory with runlog_*.csv")->required();
  report->add_option("--out", report_out, "Report directory (default: <logs>/../report)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      adapta::cmd_gen_data(gen_seed, gen_records, gen_samples, gen_out);
      fmt::print("wrote {} records to {}\n", gen_records, gen_out);
    } else if (*derive) {
      for (const auto& w : adapta::cmd_derive(derive_data, derive_out)) fmt::print(stderr, "warning: {}\n", w);
      fmt::print("wrote {}\n", derive_out);
    } else if (*run) {
      spec.scenarios.clear();
      for (const auto& s : scenarios) {
        if (s == "all") {
          spec.scenarios = {adapta::Scenario::S1, adapta::Scenario::S2, adapta::Scenario::S3};
          break;
        }
        const auto parsed = adapta::parse_scenario(s);
        if (!parsed) throw adapta::UsageError(fmt::format("unknown scenario '{}'", s));
        if (std::find(spec.scenarios.begin(), spec.scenarios.end(), *parsed) == spec.scenarios.end()) {
          spec.scenarios.push_back(*parsed);
        }
      }
      if (mode == "both") {
        spec.modes = {adapta::Mode::Baseline, adapta::Mode::Adaptive};
      } else {
        spec.modes = {*adapta::parse_mode(mode)};
      }
      if (run->count("--battery-rate")) spec.battery_rate = battery_rate;
      spec.stale_hold = !no_stale_hold;
      const auto out = output_dir(run_out);
      const auto result = adapta::cmd_run(spec, model, out);
      fmt::print("{}", adapta::render_summary(result.report));
      fmt::print("\nwrote {} run logs to {}\n", result.logs.size(), (out / "logs").string());
    } else if (*report) {
      std::filesystem::path logs = std::filesystem::path(report_logs).lexically_normal();
      if (!logs.has_filename()) logs = logs.parent_path();
      const std::filesystem::path out =
          report_out.empty() ? logs.parent_path() / "report" : std::filesystem::path(report_out);
      fmt::print("{}", adapta::render_summary(adapta::cmd_report(logs, out)));
    }
  } catch (const adapta::UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const adapta::ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitData;
  }
  return 0;
}
