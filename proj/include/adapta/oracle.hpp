#pragma once

// Expected-outcome computation (rule-based and weighted-score oracles) and
// the pass/fail comparison.

#include <array>
#include <cstdint>
#include <optional>

#include "adapta/core_model.hpp"

namespace adapta {

/// Per-sensor risk; an empty entry marks a deactivated sensor.
struct RiskVector {
  std::array<std::optional<RiskLevel>, kSensorCount> levels{};

  std::optional<RiskLevel>& operator[](SensorKind s) { return levels[index_of(s)]; }
  const std::optional<RiskLevel>& operator[](SensorKind s) const { return levels[index_of(s)]; }
  int active_count() const;
  friend bool operator==(const RiskVector&, const RiskVector&) = default;
};

RiskVector to_risk_vector(const Dsr& dsr, const RiskRangeTable& table);

/// Rule-based oracle. Deactivated entries are excluded from every count;
/// rules are tried from the most severe down. Throws OracleUndefined when
/// no sensor is active.
OutcomeLevel expected_default(const RiskVector& rv);

/// Low 5, Medium 20, High 100.
int score(RiskLevel level);

struct WeightVector {
  std::array<double, kSensorCount> w = {1, 1, 1, 1, 1, 1};

  double operator[](SensorKind s) const { return w[index_of(s)]; }
  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

/// Heart rate and blood pressure are weighted by BMI profile; every other
/// sensor, and every non-BMI profile, weighs 1.
WeightVector weights_for(Profile profile);

/// Weighted mean score over the active sensors.
double overall_score(const RiskVector& rv, const WeightVector& w);
/// Maps a score to an outcome with the fixed thresholds 8, 11, 20, 36.
OutcomeLevel outcome_for_score(double score);
OutcomeLevel expected_weighted(const RiskVector& rv, const WeightVector& w);

inline constexpr int kDefaultCompareThreshold = 2;

/// Passes when the outcome IDs differ by less than `threshold`.
bool compare(OutcomeLevel expected, OutcomeLevel actual, int threshold = kDefaultCompareThreshold);

struct Verdict {
  std::int64_t tick = 0;
  OutcomeLevel expected = OutcomeLevel::VeryLow;
  OutcomeLevel actual = OutcomeLevel::VeryLow;
  bool pass = true;
  Scenario scenario = Scenario::S1;
  Mode mode = Mode::Adaptive;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

}  // namespace adapta
