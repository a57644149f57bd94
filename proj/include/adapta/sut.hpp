#pragma once

// Reference body sensor network under test: fuses each DSR into a patient
// risk level, runs per-sensor batteries with activation/deactivation, and
// carries seeded faults so failures are discoverable.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "adapta/core_model.hpp"
#include "adapta/rng.hpp"

namespace adapta {

enum class FusionMode : std::uint8_t { RuleBased };

struct FaultConfig {
  /// Inactive sensors keep contributing their last recorded value.
  bool stale_hold = true;
  /// Probability that the fused outcome is moved one level up or down.
  double misclassify_prob = 0.0;
  FusionMode fusion = FusionMode::RuleBased;
};

struct SutConfig {
  FaultConfig faults;
  /// Percent per tick; each sensor's rate is this times its drain factor.
  double battery_rate = 0.05;
  bool instant_recharge = false;
  double deactivate_at = 20.0;
  double reactivate_at = 90.0;
  /// Relative sampling load per sensor. Distinct factors keep the sensors
  /// from cycling in lockstep.
  std::array<double, kSensorCount> drain_factor = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
};

struct BatteryState {
  double level = 100.0;
  bool active = true;
  double rate = 0.0;
};

enum class StatusKind : std::uint8_t { SensorDeactivated, SensorActivated };

struct StatusEvent {
  std::int64_t tick = 0;
  StatusKind kind = StatusKind::SensorDeactivated;
  SensorKind sensor = SensorKind::Oxi;

  friend bool operator==(const StatusEvent&, const StatusEvent&) = default;
};

struct BsnOutcome {
  std::int64_t tick = 0;
  OutcomeLevel level = OutcomeLevel::VeryLow;
};

struct SutTickResult {
  BsnOutcome outcome;
  std::vector<StatusEvent> events;
};

struct SensorStatus {
  bool active = true;
  double level = 100.0;
};

/// Rule-based fusion with descending-ID precedence, over whatever readings
/// are present. Returns VeryLow when nothing is present.
OutcomeLevel fuse_rule_based(const std::array<std::optional<RiskLevel>, kSensorCount>& levels);

class SutSim {
 public:
  SutSim(RiskRangeTable table, std::uint64_t seed);

  /// Applies a configuration. Only allowed before the first tick; throws
  /// UsageError afterwards and ConfigError on invalid values.
  void configure(const SutConfig& config);
  const SutConfig& config() const { return config_; }

  /// Advances batteries to dsr.tick, refreshes the internal reading table
  /// and returns the fused outcome with any status changes.
  SutTickResult tick(const Dsr& dsr);

  std::array<SensorStatus, kSensorCount> sensor_status() const;
  const BatteryState& battery(SensorKind s) const { return batteries_[index_of(s)]; }

  /// The readings the BSN currently fuses (and logs). Deactivated entries
  /// mean the BSN holds no value for that sensor.
  Dsr reported_dsr() const { return reported_; }

 private:
  void advance_battery(std::int64_t tick, std::vector<StatusEvent>& events);

  RiskRangeTable table_;
  Rng rng_;
  SutConfig config_;
  std::array<BatteryState, kSensorCount> batteries_{};
  Dsr reported_;
  std::optional<std::int64_t> last_tick_;
};

}  // namespace adapta
