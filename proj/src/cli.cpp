#include "adapta/cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "adapta/errors.hpp"
#include "adapta/ingest.hpp"

namespace adapta {

namespace fs = std::filesystem;

void validate(const ExperimentSpec& spec) {
  if (spec.scenarios.empty()) throw UsageError("no scenario selected");
  if (spec.modes.empty()) throw UsageError("no mode selected");
  if (spec.repetitions < 1) throw UsageError("repetitions must be at least 1");
  if (spec.duration <= 0) throw UsageError("duration must be positive");
  if (spec.test_window <= 0) throw UsageError("test window must be positive");
  if (spec.pause < 0) throw UsageError("pause must be non-negative");
  if (spec.battery_rate && !(*spec.battery_rate >= 0)) throw UsageError("battery rate must be non-negative");
  if (!(spec.misclassify_prob >= 0 && spec.misclassify_prob <= 1)) {
    throw UsageError("misclassify probability must lie in [0, 1]");
  }
  if (spec.threshold < 1) throw UsageError("threshold must be at least 1");
  if (spec.jobs < 1) throw UsageError("jobs must be at least 1");
}

std::vector<RunConfig> expand(const ExperimentSpec& spec) {
  validate(spec);
  std::vector<RunConfig> out;
  for (Scenario s : spec.scenarios) {
    for (Mode m : spec.modes) {
      for (int k = 0; k < spec.repetitions; ++k) {
        RunConfig c = default_run_config(s, m, spec.duration);
        c.repetition = k;
        c.patient_seed = spec.patient_seed + static_cast<std::uint64_t>(k);
        c.sut_seed = spec.sut_seed + static_cast<std::uint64_t>(k);
        if (spec.battery_rate) c.sut.battery_rate = *spec.battery_rate;
        c.sut.faults.misclassify_prob = spec.misclassify_prob;
        c.sut.faults.stale_hold = spec.stale_hold;
        c.test_window = spec.test_window;
        c.pause = spec.pause;
        c.threshold = spec.threshold;
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::vector<RunLog> run_experiment(const ExperimentSpec& spec, std::shared_ptr<const ModelCatalog> catalog) {
  const auto configs = expand(spec);
  for (const auto& c : configs) validate(c, *catalog);

  std::vector<RunLog> logs(configs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      try {
        logs[i] = run(configs[i], catalog);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), configs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return logs;
}

std::string runlog_filename(const RunConfig& config) {
  return fmt::format("runlog_{}_{}_rep{}.csv", scenario_name(config.scenario), mode_name(config.mode),
                     config.repetition);
}

namespace {

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", file.string()));
  out << text;
  if (!out) throw Error(fmt::format("failed writing {}", file.string()));
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

RunLog load_runlog(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", file.string()));
  return read_runlog(in, file.filename().string());
}

StatReport report_from_files(const std::vector<fs::path>& files) {
  std::vector<RunLog> logs;
  logs.reserve(files.size());
  for (const auto& f : files) logs.push_back(load_runlog(f));
  return summarize(logs);
}

}  // namespace

void cmd_gen_data(std::uint64_t seed, int n_records, int samples, const fs::path& out) {
  if (n_records < 1) throw UsageError("records must be at least 1");
  if (samples < 2) throw UsageError("samples must be at least 2");
  make_dirs(out);
  save_field_data(generate_synthetic_dataset(seed, n_records, samples), out);
}

std::vector<std::string> cmd_derive(const fs::path& data_dir, const fs::path& model_out) {
  const FieldDataset data = load_field_data(data_dir);
  if (data.records.empty()) throw ValidationError(fmt::format("no records in {}", data_dir.string()));
  DerivedModels derived = build_profile_models(data);
  if (model_out.has_parent_path()) make_dirs(model_out.parent_path());
  save_profile_models(derived.models, model_out);
  return derived.warnings;
}

void write_report(const StatReport& report, const fs::path& dir) {
  make_dirs(dir);
  write_text(dir / "table4.csv", render_table4_csv(report));
  write_text(dir / "table5.csv", render_table5_csv(report));
  write_text(dir / "stats.csv", render_stats_csv(report));
  write_text(dir / "summary.txt", render_summary(report));
}

RunOutputs cmd_run(const ExperimentSpec& spec, const fs::path& model, const fs::path& out) {
  validate(spec);
  if (!fs::exists(model)) throw Error(fmt::format("model file {} not found", model.string()));
  auto catalog = std::make_shared<const ModelCatalog>(make_catalog(load_profile_models(model)));
  const auto logs = run_experiment(spec, catalog);

  RunOutputs result;
  const fs::path log_dir = out / "logs";
  make_dirs(log_dir);
  for (const auto& log : logs) {
    const fs::path file = log_dir / runlog_filename(log.config);
    std::ofstream f(file, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write {}", file.string()));
    write_runlog(log, f);
    if (!f) throw Error(fmt::format("failed writing {}", file.string()));
    result.logs.push_back(file);
  }
  // The report is built from the files just written so that cmd_report on
  // the same logs reproduces it exactly.
  auto sorted = result.logs;
  std::sort(sorted.begin(), sorted.end());
  result.report = report_from_files(sorted);
  write_report(result.report, out / "report");
  return result;
}

StatReport cmd_report(const fs::path& log_dir, const fs::path& out_dir) {
  if (!fs::is_directory(log_dir)) throw Error(fmt::format("{} is not a directory", log_dir.string()));
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(log_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("runlog_", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  if (files.empty()) throw ValidationError(fmt::format("no run logs in {}", log_dir.string()));
  std::sort(files.begin(), files.end());
  StatReport report = report_from_files(files);
  write_report(report, out_dir);
  return report;
}

}  // namespace adapta
