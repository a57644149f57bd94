#pragma once

// The adaptive testing loop: patient simulation feeding the BSN, the
// monitor / analyse / plan / execute adaptation components, the test
// strategy, BSN logging, the oracle and the comparison.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "adapta/core_model.hpp"
#include "adapta/dtmc.hpp"
#include "adapta/oracle.hpp"
#include "adapta/sut.hpp"

namespace adapta {

enum class ChangeKind : std::uint8_t {
  SensorDeactivated,
  SensorActivated,
  ProfileChanged,
  CriticalDSR,
};

struct ChangeEvent {
  std::int64_t tick = 0;
  ChangeKind kind = ChangeKind::CriticalDSR;
  SensorKind sensor = SensorKind::Oxi;  // Sensor(De)Activated only
  Profile profile = Profile::Youth;     // ProfileChanged only

  friend bool operator==(const ChangeEvent&, const ChangeEvent&) = default;
};

/// "SensorDeactivated:Term", "ProfileChanged:Obesity3", "CriticalDSR".
std::string describe(const ChangeEvent& e);

enum class AdaptTarget : std::uint8_t { TestCases, Oracle, TestStrategy };
std::string_view target_name(AdaptTarget t);

struct AdaptationDecision {
  AdaptTarget target = AdaptTarget::TestCases;
  ChangeEvent cause;
};

/// Label (or stop labelling) a sensor's readings as deactivated.
struct LabelSensor {
  SensorKind sensor;
  bool deactivated;
};
/// Replace the oracle's weights.
struct InstallWeights {
  Profile profile;
  WeightVector weights;
};
/// Test the DSR of this tick.
struct RequestTest {
  std::int64_t tick;
};

struct AdaptationPlan {
  ChangeEvent cause;
  std::variant<LabelSensor, InstallWeights, RequestTest> action;
};

class TestStrategy {
 public:
  enum class Kind : std::uint8_t { Periodic, OnDemand };

  static TestStrategy periodic(std::int64_t test_window = 60, std::int64_t pause = 300);
  static TestStrategy on_demand();

  Kind kind() const { return kind_; }
  std::int64_t test_window() const { return test_window_; }
  std::int64_t pause() const { return pause_; }
  bool ts() const { return ts_; }
  void request() { ts_ = true; }

  /// Periodic: inside the test window of the current (window + pause)
  /// cycle, which opens at tick 0. OnDemand: returns and clears ts.
  bool should_test(std::int64_t tick);

 private:
  Kind kind_ = Kind::Periodic;
  std::int64_t test_window_ = 60;
  std::int64_t pause_ = 300;
  bool ts_ = false;
};

struct LedgerEntry {
  std::int64_t tick = 0;
  AdaptTarget target = AdaptTarget::TestCases;
  std::string action;  // e.g. "Deactivate:Term", "Weights:Obesity3", "ts"

  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

/// Shared knowledge the adaptation components read and modify.
struct AdaptationState {
  std::array<bool, kSensorCount> labelled{};
  WeightVector weights;
  TestStrategy strategy = TestStrategy::periodic();
  std::vector<LedgerEntry> ledger;
};

/// Observes the patient simulation and the BSN once per tick.
class Monitor {
 public:
  explicit Monitor(RiskRangeTable table) : table_(std::move(table)) {}

  std::vector<ChangeEvent> observe(const Dsr& dsr, std::span<const StatusEvent> sut_events,
                                   Profile profile_now);

 private:
  RiskRangeTable table_;
  std::optional<Profile> previous_;
};

/// The scenario's adaptation target when `event` is its trigger.
std::optional<AdaptationDecision> analyse(const ChangeEvent& event, Scenario scenario);
AdaptationPlan plan(const AdaptationDecision& decision);
/// Applies the plan to `state` and appends one ledger entry.
void execute(const AdaptationPlan& plan, AdaptationState& state);

/// Replaces labelled sensors' readings with the deactivated marker.
Dsr apply_test_case_adapter(const Dsr& dsr, const AdaptationState& state);

struct RunConfig {
  Scenario scenario = Scenario::S1;
  Mode mode = Mode::Adaptive;
  ProfileSchedule schedule;
  std::uint64_t patient_seed = 1;
  std::uint64_t sut_seed = 101;
  int repetition = 0;
  SutConfig sut;
  std::int64_t test_window = 60;
  std::int64_t pause = 300;
  int threshold = kDefaultCompareThreshold;
};

/// All 13 profiles for S1/S3, the six BMI profiles for S2.
ProfileSchedule default_schedule(Scenario scenario, std::int64_t duration = 3600);
/// Scenario defaults: battery rate 0.65 under S1, 0.05 otherwise.
RunConfig default_run_config(Scenario scenario, Mode mode, std::int64_t duration = 3600);

/// Throws ConfigError on an invalid configuration or missing models.
void validate(const RunConfig& config, const ModelCatalog& catalog);

struct LogEntry {
  std::int64_t tick = 0;
  Profile profile = Profile::Youth;
  /// The DSR as the oracle sees it (after test-case adaptation).
  Dsr readings;
  OutcomeLevel bsn = OutcomeLevel::VeryLow;
  std::optional<OutcomeLevel> expected;
  std::optional<bool> pass;
  std::vector<std::string> events;

  bool tested() const { return pass.has_value(); }
  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

struct RunLog {
  RunConfig config;
  std::vector<LogEntry> entries;
  std::vector<LedgerEntry> ledger;
  std::int64_t untestable = 0;  // test windows that hit an all-deactivated DSR

  std::int64_t tested_dsrs() const;
  /// Test cases counted per active sensor reading rather than per DSR.
  std::int64_t tested_readings() const;
  std::vector<Verdict> verdicts() const;
};

RunLog run(const RunConfig& config, std::shared_ptr<const ModelCatalog> catalog);

inline constexpr const char* kRunLogVersion = "1";

/// Header comment lines, then one CSV row per tick. Deterministic bytes.
void write_runlog(const RunLog& log, std::ostream& out);
/// Reads a log written by write_runlog. Throws ParseError.
RunLog read_runlog(std::istream& in, const std::string& source = "runlog");

}  // namespace adapta
