#pragma once

// PTCR, Mann-Whitney U, Vargha-Delaney A12 and the report tables.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adapta/core_model.hpp"
#include "adapta/harness.hpp"
#include "adapta/oracle.hpp"

namespace adapta {

/// Percentage of passing verdicts; empty when there are none.
std::optional<double> ptcr(std::span<const Verdict> verdicts);

struct SampleGroup {
  std::string label;
  std::vector<double> values;
};

struct MannWhitneyResult {
  double u = 0;
  /// Only when neither group exceeds kExactLimit values.
  std::optional<double> p_exact;
  double p_normal = 1;
};

inline constexpr std::size_t kExactLimit = 12;

/// U counts pairs where a beats b (ties count half). Two-sided p values:
/// exact by enumerating every split of the pooled values, and the normal
/// approximation with continuity and tie corrections. Throws UsageError on
/// an empty group.
MannWhitneyResult mann_whitney_u(const SampleGroup& a, const SampleGroup& b);
double a12(const SampleGroup& a, const SampleGroup& b);

double mean(std::span<const double> v);
/// Population (n denominator) standard deviation. 0 for a single value.
double std_dev(std::span<const double> v);

struct GroupSummary {
  SampleGroup group;
  double mean = 0;
  double std = 0;
};

/// Baseline against adaptive. Either side may be missing; the test
/// statistics need both.
struct Comparison {
  std::optional<GroupSummary> baseline;
  std::optional<GroupSummary> adaptive;
  std::optional<MannWhitneyResult> mw;
  std::optional<double> a12;
};

struct ScenarioReport {
  Scenario scenario = Scenario::S1;
  Comparison overall;
  std::vector<std::pair<Profile, Comparison>> per_profile;
  /// Mean test cases per run, counted per DSR and per active reading.
  double baseline_cases_dsr = 0, baseline_cases_readings = 0;
  double adaptive_cases_dsr = 0, adaptive_cases_readings = 0;
};

struct StatReport {
  std::vector<ScenarioReport> scenarios;
  std::vector<std::string> warnings;
};

/// Throws ValidationError when the adaptive and baseline logs cover
/// different scenarios or a (scenario, mode, repetition) repeats.
StatReport summarize(const std::vector<RunLog>& logs);

std::string render_table4_csv(const StatReport& report);
std::string render_table5_csv(const StatReport& report);
std::string render_stats_csv(const StatReport& report);
std::string render_summary(const StatReport& report);

}  // namespace adapta
