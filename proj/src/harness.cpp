#include "adapta/harness.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "adapta/errors.hpp"

namespace adapta {

std::string describe(const ChangeEvent& e) {
  switch (e.kind) {
    case ChangeKind::SensorDeactivated: return fmt::format("SensorDeactivated:{}", sensor_name(e.sensor));
    case ChangeKind::SensorActivated: return fmt::format("SensorActivated:{}", sensor_name(e.sensor));
    case ChangeKind::ProfileChanged: return fmt::format("ProfileChanged:{}", profile_name(e.profile));
    case ChangeKind::CriticalDSR: return "CriticalDSR";
  }
  return "?";
}

std::string_view target_name(AdaptTarget t) {
  switch (t) {
    case AdaptTarget::TestCases: return "TestCases";
    case AdaptTarget::Oracle: return "Oracle";
    case AdaptTarget::TestStrategy: return "TestStrategy";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Test strategy
// ---------------------------------------------------------------------------

TestStrategy TestStrategy::periodic(std::int64_t test_window, std::int64_t pause) {
  if (test_window <= 0) throw ConfigError("test window must be positive");
  if (pause < 0) throw ConfigError("pause must be non-negative");
  TestStrategy s;
  s.kind_ = Kind::Periodic;
  s.test_window_ = test_window;
  s.pause_ = pause;
  return s;
}

TestStrategy TestStrategy::on_demand() {
  TestStrategy s;
  s.kind_ = Kind::OnDemand;
  return s;
}

bool TestStrategy::should_test(std::int64_t tick) {
  if (kind_ == Kind::Periodic) return tick % (test_window_ + pause_) < test_window_;
  const bool due = ts_;
  ts_ = false;
  return due;
}

// ---------------------------------------------------------------------------
// Monitor / Analyse / Plan / Execute
// ---------------------------------------------------------------------------

std::vector<ChangeEvent> Monitor::observe(const Dsr& dsr, std::span<const StatusEvent> sut_events,
                                          Profile profile_now) {
  std::vector<ChangeEvent> out;
  for (const auto& ev : sut_events) {
    out.push_back({dsr.tick,
                   ev.kind == StatusKind::SensorDeactivated ? ChangeKind::SensorDeactivated
                                                            : ChangeKind::SensorActivated,
                   ev.sensor, profile_now});
  }
  if (!previous_ || *previous_ != profile_now) {
    out.push_back({dsr.tick, ChangeKind::ProfileChanged, SensorKind::Oxi, profile_now});
  }
  previous_ = profile_now;

  int high = 0;
  for (const auto& r : dsr.readings) {
    if (r.value && classify_risk(r.sensor, *r.value, table_) == RiskLevel::High) ++high;
  }
  if (high >= 2) out.push_back({dsr.tick, ChangeKind::CriticalDSR, SensorKind::Oxi, profile_now});
  return out;
}

std::optional<AdaptationDecision> analyse(const ChangeEvent& event, Scenario scenario) {
  switch (scenario) {
    case Scenario::S1:
      if (event.kind == ChangeKind::SensorDeactivated || event.kind == ChangeKind::SensorActivated) {
        return AdaptationDecision{AdaptTarget::TestCases, event};
      }
      break;
    case Scenario::S2:
      if (event.kind == ChangeKind::ProfileChanged) return AdaptationDecision{AdaptTarget::Oracle, event};
      break;
    case Scenario::S3:
      if (event.kind == ChangeKind::CriticalDSR) {
        return AdaptationDecision{AdaptTarget::TestStrategy, event};
      }
      break;
  }
  return std::nullopt;
}

AdaptationPlan plan(const AdaptationDecision& decision) {
  const ChangeEvent& cause = decision.cause;
  switch (decision.target) {
    case AdaptTarget::TestCases:
      return {cause, LabelSensor{cause.sensor, cause.kind == ChangeKind::SensorDeactivated}};
    case AdaptTarget::Oracle:
      return {cause, InstallWeights{cause.profile, weights_for(cause.profile)}};
    case AdaptTarget::TestStrategy:
      return {cause, RequestTest{cause.tick}};
  }
  throw UsageError("unknown adaptation target");
}

void execute(const AdaptationPlan& p, AdaptationState& state) {
  const std::int64_t tick = p.cause.tick;
  if (const auto* label = std::get_if<LabelSensor>(&p.action)) {
    state.labelled[index_of(label->sensor)] = label->deactivated;
    state.ledger.push_back({tick, AdaptTarget::TestCases,
                            fmt::format("{}:{}", label->deactivated ? "Deactivate" : "Activate",
                                        sensor_name(label->sensor))});
  } else if (const auto* weights = std::get_if<InstallWeights>(&p.action)) {
    state.weights = weights->weights;
    state.ledger.push_back(
        {tick, AdaptTarget::Oracle, fmt::format("Weights:{}", profile_name(weights->profile))});
  } else if (std::holds_alternative<RequestTest>(p.action)) {
    state.strategy.request();
    state.ledger.push_back({tick, AdaptTarget::TestStrategy, "ts"});
  }
}

Dsr apply_test_case_adapter(const Dsr& dsr, const AdaptationState& state) {
  Dsr out = dsr;
  for (auto s : kAllSensors) {
    if (state.labelled[index_of(s)]) out.at(s).value.reset();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

ProfileSchedule default_schedule(Scenario scenario, std::int64_t duration) {
  if (scenario == Scenario::S2) return ProfileSchedule::uniform(kBmiProfiles, duration);
  return ProfileSchedule::uniform(kAllProfiles, duration);
}

RunConfig default_run_config(Scenario scenario, Mode mode, std::int64_t duration) {
  RunConfig c;
  c.scenario = scenario;
  c.mode = mode;
  c.schedule = default_schedule(scenario, duration);
  c.sut.battery_rate = scenario == Scenario::S1 ? 0.65 : 0.05;
  return c;
}

void validate(const RunConfig& config, const ModelCatalog& catalog) {
  if (config.schedule.segments().empty()) throw ConfigError("profile schedule is empty");
  for (const auto& [p, d] : config.schedule.segments()) {
    if (d <= 0) throw ConfigError(fmt::format("profile {} has non-positive duration", profile_name(p)));
    if (config.scenario == Scenario::S2 && dimension_of(p) != ProfileDimension::Bmi) {
      throw ConfigError(fmt::format("scenario s2 only schedules BMI profiles, got {}", profile_name(p)));
    }
    if (!catalog.count(p)) throw ConfigError(fmt::format("no model for profile {}", profile_name(p)));
  }
  if (config.test_window <= 0) throw ConfigError("test window must be positive");
  if (config.pause < 0) throw ConfigError("pause must be non-negative");
  if (config.threshold < 1) throw ConfigError("comparison threshold must be at least 1");
  const RiskRangeTable& table = catalog.begin()->second.ranges;
  for (const auto& [p, m] : catalog) {
    if (m.ranges != table) throw ConfigError("models in the catalog use different risk bands");
  }
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

std::int64_t RunLog::tested_dsrs() const {
  return std::count_if(entries.begin(), entries.end(), [](const LogEntry& e) { return e.tested(); });
}

std::int64_t RunLog::tested_readings() const {
  std::int64_t n = 0;
  for (const auto& e : entries) {
    if (!e.tested()) continue;
    for (const auto& r : e.readings.readings) n += r.value.has_value();
  }
  return n;
}

std::vector<Verdict> RunLog::verdicts() const {
  std::vector<Verdict> out;
  for (const auto& e : entries) {
    if (!e.tested()) continue;
    out.push_back({e.tick, *e.expected, e.bsn, *e.pass, config.scenario, config.mode});
  }
  return out;
}

RunLog run(const RunConfig& config, std::shared_ptr<const ModelCatalog> catalog) {
  if (!catalog || catalog->empty()) throw ConfigError("no profile models loaded");
  validate(config, *catalog);

  const RiskRangeTable& table = catalog->begin()->second.ranges;
  const auto& segments = config.schedule.segments();
  const bool adaptive = config.mode == Mode::Adaptive;

  PatientSim patient(catalog, segments.front().first, config.patient_seed, segments.front().second);
  SutSim sut(table, config.sut_seed);
  sut.configure(config.sut);
  Monitor monitor(table);

  AdaptationState state;
  state.strategy = adaptive && config.scenario == Scenario::S3
                       ? TestStrategy::on_demand()
                       : TestStrategy::periodic(config.test_window, config.pause);
  const WeightVector unit_weights;

  RunLog log;
  log.config = config;
  log.entries.reserve(static_cast<std::size_t>(config.schedule.total_ticks()));

  for (std::size_t seg = 0; seg < segments.size(); ++seg) {
    if (seg > 0) patient.set_profile(segments[seg].first, segments[seg].second);
    while (auto dsr = patient.next_dsr()) {
      const SutTickResult bsn = sut.tick(*dsr);

      LogEntry entry;
      entry.tick = dsr->tick;
      entry.profile = dsr->profile;
      entry.bsn = bsn.outcome.level;

      const auto changes = monitor.observe(*dsr, bsn.events, dsr->profile);
      for (const auto& c : changes) entry.events.push_back(describe(c));
      if (adaptive) {
        for (const auto& c : changes) {
          const auto decision = analyse(c, config.scenario);
          if (!decision) continue;
          execute(plan(*decision), state);
          const LedgerEntry& done = state.ledger.back();
          entry.events.push_back(fmt::format("Adapt:{}:{}", target_name(done.target), done.action));
        }
      }

      // S1 tests the DSR as logged by the BSN: the baseline keeps the held
      // values of deactivated sensors, the adaptive run labels them.
      if (config.scenario == Scenario::S1) {
        entry.readings = adaptive ? apply_test_case_adapter(*dsr, state) : sut.reported_dsr();
      } else {
        entry.readings = *dsr;
      }

      if (state.strategy.should_test(dsr->tick)) {
        const RiskVector rv = to_risk_vector(entry.readings, table);
        if (rv.active_count() == 0) {
          ++log.untestable;
        } else {
          OutcomeLevel expected;
          if (config.scenario == Scenario::S2) {
            expected = expected_weighted(rv, adaptive ? state.weights : unit_weights);
          } else {
            expected = expected_default(rv);
          }
          entry.expected = expected;
          entry.pass = compare(expected, entry.bsn, config.threshold);
        }
      }
      log.entries.push_back(std::move(entry));
    }
  }
  log.ledger = std::move(state.ledger);
  return log;
}

}  // namespace adapta
