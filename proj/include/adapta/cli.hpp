#pragma once

// Subcommands behind the adapta executable. Each is usable on its own so the
// pipeline stages can be driven from tests and the Python module.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "adapta/dtmc.hpp"
#include "adapta/harness.hpp"
#include "adapta/stats.hpp"

namespace adapta {

struct ExperimentSpec {
  std::vector<Scenario> scenarios = {Scenario::S1, Scenario::S2, Scenario::S3};
  std::vector<Mode> modes = {Mode::Baseline, Mode::Adaptive};
  int repetitions = 5;
  std::uint64_t patient_seed = 1;  // repetition k uses patient_seed + k
  std::uint64_t sut_seed = 101;    // and sut_seed + k
  std::int64_t duration = 3600;    // seconds per profile
  std::int64_t test_window = 60;
  std::int64_t pause = 300;
  /// Overrides the per-scenario default rate when set.
  std::optional<double> battery_rate;
  double misclassify_prob = 0.05;
  bool stale_hold = true;
  int threshold = kDefaultCompareThreshold;
  int jobs = 1;
};

/// Throws UsageError on an invalid spec.
void validate(const ExperimentSpec& spec);

/// One RunConfig per scenario x mode x repetition, in that nesting order.
std::vector<RunConfig> expand(const ExperimentSpec& spec);

/// Executes every run of the spec, up to spec.jobs at a time. The result
/// order matches expand() regardless of scheduling.
std::vector<RunLog> run_experiment(const ExperimentSpec& spec, std::shared_ptr<const ModelCatalog> catalog);

/// "runlog_s1_adaptive_rep0.csv"
std::string runlog_filename(const RunConfig& config);

void cmd_gen_data(std::uint64_t seed, int n_records, int samples, const std::filesystem::path& out);
/// Returns the derivation warnings.
std::vector<std::string> cmd_derive(const std::filesystem::path& data_dir, const std::filesystem::path& model_out);

struct RunOutputs {
  std::vector<std::filesystem::path> logs;
  StatReport report;
};

/// Writes <out>/logs/runlog_*.csv and the report under <out>/report.
RunOutputs cmd_run(const ExperimentSpec& spec, const std::filesystem::path& model,
                   const std::filesystem::path& out);

/// Rebuilds the report from every runlog_*.csv in `log_dir` and writes it to
/// `out_dir`. Throws ValidationError when there are no logs.
StatReport cmd_report(const std::filesystem::path& log_dir, const std::filesystem::path& out_dir);

/// table4.csv, table5.csv, stats.csv and summary.txt.
void write_report(const StatReport& report, const std::filesystem::path& dir);

}  // namespace adapta
