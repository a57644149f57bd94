#include "adapta/oracle.hpp"

#include <cstdlib>

#include "adapta/errors.hpp"

namespace adapta {

namespace {
constexpr double kScoreTolerance = 1e-9;
}

int RiskVector::active_count() const {
  int n = 0;
  for (const auto& l : levels) n += l.has_value();
  return n;
}

RiskVector to_risk_vector(const Dsr& dsr, const RiskRangeTable& table) {
  RiskVector rv;
  for (auto s : kAllSensors) {
    if (const auto& v = dsr.at(s).value) rv[s] = classify_risk(s, *v, table);
  }
  return rv;
}

OutcomeLevel expected_default(const RiskVector& rv) {
  if (rv.active_count() == 0) throw OracleUndefined("every sensor is deactivated");
  std::array<int, 3> tally{};
  for (const auto& l : rv.levels) {
    if (l) ++tally[static_cast<std::size_t>(*l)];
  }
  const int medium = tally[static_cast<std::size_t>(RiskLevel::Medium)];
  const int high = tally[static_cast<std::size_t>(RiskLevel::High)];
  if (high > 1) return OutcomeLevel::VeryCritical;
  if (high == 1) return OutcomeLevel::Critical;
  if (medium > 1) return OutcomeLevel::Moderate;
  if (medium == 1) return OutcomeLevel::Low;
  return OutcomeLevel::VeryLow;
}

int score(RiskLevel level) {
  switch (level) {
    case RiskLevel::Low: return 5;
    case RiskLevel::Medium: return 20;
    case RiskLevel::High: return 100;
  }
  return 0;
}

WeightVector weights_for(Profile profile) {
  double priority = 1.0;
  switch (profile) {
    case Profile::Underweight:
    case Profile::Overweight: priority = 1.75; break;
    case Profile::Obesity1: priority = 1.85; break;
    case Profile::Obesity2: priority = 1.90; break;
    case Profile::Obesity3: priority = 2.0; break;
    default: break;
  }
  WeightVector w;
  w.w[index_of(SensorKind::Ecg)] = priority;
  w.w[index_of(SensorKind::Abps)] = priority;
  w.w[index_of(SensorKind::Abpd)] = priority;
  return w;
}

double overall_score(const RiskVector& rv, const WeightVector& w) {
  const int n = rv.active_count();
  if (n == 0) throw OracleUndefined("every sensor is deactivated");
  double sum = 0;
  for (auto s : kAllSensors) {
    if (rv[s]) sum += w[s] * score(*rv[s]);
  }
  return sum / n;
}

OutcomeLevel outcome_for_score(double s) {
  if (s < 8 - kScoreTolerance) return OutcomeLevel::VeryLow;
  if (s < 11 - kScoreTolerance) return OutcomeLevel::Low;
  if (s <= 20 + kScoreTolerance) return OutcomeLevel::Moderate;
  if (s <= 36 + kScoreTolerance) return OutcomeLevel::Critical;
  return OutcomeLevel::VeryCritical;
}

OutcomeLevel expected_weighted(const RiskVector& rv, const WeightVector& w) {
  return outcome_for_score(overall_score(rv, w));
}

bool compare(OutcomeLevel expected, OutcomeLevel actual, int threshold) {
  return std::abs(id(expected) - id(actual)) < threshold;
}

}  // namespace adapta
