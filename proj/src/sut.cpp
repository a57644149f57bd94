#include "adapta/sut.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "adapta/errors.hpp"

namespace adapta {

OutcomeLevel fuse_rule_based(const std::array<std::optional<RiskLevel>, kSensorCount>& levels) {
  int medium = 0;
  int high = 0;
  for (const auto& l : levels) {
    if (!l) continue;
    if (*l == RiskLevel::Medium) ++medium;
    if (*l == RiskLevel::High) ++high;
  }
  if (high >= 2) return OutcomeLevel::VeryCritical;
  if (high == 1) return OutcomeLevel::Critical;
  if (medium >= 2) return OutcomeLevel::Moderate;
  if (medium == 1) return OutcomeLevel::Low;
  return OutcomeLevel::VeryLow;
}

SutSim::SutSim(RiskRangeTable table, std::uint64_t seed) : table_(std::move(table)), rng_(seed) {
  configure(SutConfig{});
}

void SutSim::configure(const SutConfig& config) {
  if (last_tick_) throw UsageError("the BSN can only be configured before its first tick");
  const auto& f = config.faults;
  if (!(f.misclassify_prob >= 0.0 && f.misclassify_prob <= 1.0)) {
    throw ConfigError(fmt::format("misclassify probability {} outside [0, 1]", f.misclassify_prob));
  }
  if (!(config.battery_rate >= 0.0) || !std::isfinite(config.battery_rate)) {
    throw ConfigError(fmt::format("battery rate {} must be non-negative", config.battery_rate));
  }
  if (!(config.deactivate_at >= 0.0 && config.deactivate_at < config.reactivate_at &&
        config.reactivate_at <= 100.0)) {
    throw ConfigError("battery thresholds must satisfy 0 <= deactivate < reactivate <= 100");
  }
  for (double d : config.drain_factor) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("drain factors must be non-negative");
  }
  config_ = config;
  for (auto s : kAllSensors) {
    batteries_[index_of(s)] = {100.0, true, config_.battery_rate * config_.drain_factor[index_of(s)]};
  }
}

void SutSim::advance_battery(std::int64_t tick, std::vector<StatusEvent>& events) {
  const std::int64_t steps = last_tick_ ? tick - *last_tick_ : 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    for (auto s : kAllSensors) {
      BatteryState& b = batteries_[index_of(s)];
      if (b.active) {
        b.level = std::max(0.0, b.level - b.rate);
        if (b.rate > 0 && b.level <= config_.deactivate_at) {
          b.active = false;
          events.push_back({tick, StatusKind::SensorDeactivated, s});
        }
      } else if (config_.instant_recharge) {
        b.level = 100.0;
        b.active = true;
        events.push_back({tick, StatusKind::SensorActivated, s});
      } else {
        b.level = std::min(100.0, b.level + b.rate);
        if (b.level >= config_.reactivate_at) {
          b.active = true;
          events.push_back({tick, StatusKind::SensorActivated, s});
        }
      }
    }
  }
}

SutTickResult SutSim::tick(const Dsr& dsr) {
  if (last_tick_ && dsr.tick <= *last_tick_) {
    throw UsageError(fmt::format("DSR tick {} does not advance past {}", dsr.tick, *last_tick_));
  }
  SutTickResult result;
  advance_battery(dsr.tick, result.events);
  last_tick_ = dsr.tick;

  reported_.tick = dsr.tick;
  reported_.profile = dsr.profile;
  std::array<std::optional<RiskLevel>, kSensorCount> levels;
  for (auto s : kAllSensors) {
    auto& held = reported_.at(s).value;
    const auto& incoming = dsr.at(s).value;
    if (batteries_[index_of(s)].active && incoming) {
      held = incoming;
    } else if (!config_.faults.stale_hold) {
      held.reset();
    }
    if (held) levels[index_of(s)] = classify_risk(s, *held, table_);
  }

  int level = id(fuse_rule_based(levels));
  if (config_.faults.misclassify_prob > 0 && rng_.bernoulli(config_.faults.misclassify_prob)) {
    level += rng_.bernoulli(0.5) ? 1 : -1;
  }
  result.outcome = {dsr.tick, outcome_from_id(level)};
  return result;
}

std::array<SensorStatus, kSensorCount> SutSim::sensor_status() const {
  std::array<SensorStatus, kSensorCount> out;
  for (auto s : kAllSensors) {
    out[index_of(s)] = {batteries_[index_of(s)].active, batteries_[index_of(s)].level};
  }
  return out;
}

}  // namespace adapta
