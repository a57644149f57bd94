#include <doctest.h>

#include <algorithm>

#include "adapta/errors.hpp"
#include "adapta/oracle.hpp"
#include "adapta/rng.hpp"

using namespace adapta;

namespace {

using L = RiskLevel;

RiskVector rv_of(std::initializer_list<std::optional<RiskLevel>> levels) {
  RiskVector rv;
  std::copy(levels.begin(), levels.end(), rv.levels.begin());
  return rv;
}

RiskVector ecg_high() { return rv_of({L::Low, L::High, L::Low, L::Low, L::Low, L::Low}); }

// Decision table indexed by (highs, mediums), written out long-hand.
int table_lookup(int highs, int mediums) {
  if (highs >= 2) return 5;
  if (highs == 1) return 4;
  if (mediums >= 2) return 3;
  if (mediums == 1) return 2;
  return 1;
}

RiskVector decode(int code) {
  RiskVector rv;
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    rv.levels[i] = static_cast<RiskLevel>(code % 3);
    code /= 3;
  }
  return rv;
}

RiskVector random_rv(Rng& rng, bool allow_inactive) {
  RiskVector rv;
  for (auto& l : rv.levels) {
    const auto pick = rng.below(allow_inactive ? 4 : 3);
    if (pick < 3) l = static_cast<RiskLevel>(pick);
  }
  if (rv.active_count() == 0) rv.levels[0] = L::Low;
  return rv;
}

}  // namespace

TEST_CASE("default oracle on each rule row") {
  CHECK(expected_default(rv_of({L::Low, L::Low, L::Low, L::Low, L::Low, L::Low})) == OutcomeLevel::VeryLow);
  CHECK(expected_default(rv_of({L::Low, L::Medium, L::Low, L::Low, L::Low, L::Low})) == OutcomeLevel::Low);
  CHECK(expected_default(rv_of({L::High, L::Low, L::Low, L::High, L::Low, L::Low})) == OutcomeLevel::VeryCritical);
  CHECK(expected_default(rv_of({L::Low, L::Low, std::nullopt, L::Low, L::Low, L::Low})) == OutcomeLevel::VeryLow);
  CHECK(expected_default(rv_of({L::High, L::Medium, L::Medium, L::Low, L::Low, L::Low})) == OutcomeLevel::Critical);
  CHECK(expected_default(rv_of({L::Medium, L::Medium, L::Low, L::Low, L::Low, L::Low})) == OutcomeLevel::Moderate);
}

TEST_CASE("all deactivated has no expected outcome") {
  CHECK_THROWS_AS(expected_default(RiskVector{}), OracleUndefined);
  CHECK_THROWS_AS(expected_weighted(RiskVector{}, WeightVector{}), OracleUndefined);
}

TEST_CASE("all 729 active vectors agree with the count table") {
  for (int code = 0; code < 729; ++code) {
    const RiskVector rv = decode(code);
    int h = 0, m = 0;
    for (const auto& l : rv.levels) {
      h += *l == L::High;
      m += *l == L::Medium;
    }
    CHECK(id(expected_default(rv)) == table_lookup(h, m));
  }
}

TEST_CASE("default oracle ignores sensor order") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    RiskVector rv = random_rv(rng, true);
    const auto want = expected_default(rv);
    for (std::size_t k = kSensorCount - 1; k > 0; --k) std::swap(rv.levels[k], rv.levels[rng.below(k + 1)]);
    CHECK(expected_default(rv) == want);
  }
}

TEST_CASE("scores and weights") {
  CHECK(score(L::Low) == 5);
  CHECK(score(L::Medium) == 20);
  CHECK(score(L::High) == 100);

  CHECK(weights_for(Profile::Obesity3)[SensorKind::Ecg] == 2.0);
  CHECK(weights_for(Profile::Obesity3)[SensorKind::Abpd] == 2.0);
  CHECK(weights_for(Profile::Obesity3)[SensorKind::Term] == 1.0);
  CHECK(weights_for(Profile::Underweight)[SensorKind::Abps] == 1.75);
  CHECK(weights_for(Profile::Overweight)[SensorKind::Ecg] == 1.75);
  CHECK(weights_for(Profile::Obesity1)[SensorKind::Ecg] == 1.85);
  CHECK(weights_for(Profile::Obesity2)[SensorKind::Ecg] == 1.90);
  CHECK(weights_for(Profile::NormalWeight) == WeightVector{});
  CHECK(weights_for(Profile::Elderly) == WeightVector{});
  CHECK(weights_for(Profile::MedicalICU) == WeightVector{});
}

TEST_CASE("weighted oracle goldens") {
  const RiskVector low = rv_of({L::Low, L::Low, L::Low, L::Low, L::Low, L::Low});
  CHECK(overall_score(low, WeightVector{}) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(expected_weighted(low, WeightVector{}) == OutcomeLevel::VeryLow);

  const RiskVector rv = ecg_high();
  CHECK(overall_score(rv, weights_for(Profile::NormalWeight)) == doctest::Approx(125.0 / 6).epsilon(1e-12));
  CHECK(expected_weighted(rv, weights_for(Profile::NormalWeight)) == OutcomeLevel::Critical);
  // Abps and Abpd carry their weight even when Low: (175 + 2 * 8.75 + 15) / 6.
  CHECK(overall_score(rv, weights_for(Profile::Overweight)) == doctest::Approx(207.5 / 6).epsilon(1e-12));
  CHECK(expected_weighted(rv, weights_for(Profile::Overweight)) == OutcomeLevel::Critical);
  CHECK(overall_score(rv, weights_for(Profile::Obesity3)) == doctest::Approx(235.0 / 6).epsilon(1e-12));
  CHECK(expected_weighted(rv, weights_for(Profile::Obesity3)) == OutcomeLevel::VeryCritical);
}

TEST_CASE("score thresholds, including the edges") {
  CHECK(outcome_for_score(7.999) == OutcomeLevel::VeryLow);
  CHECK(outcome_for_score(8.0) == OutcomeLevel::Low);
  CHECK(outcome_for_score(10.999) == OutcomeLevel::Low);
  CHECK(outcome_for_score(11.0) == OutcomeLevel::Moderate);
  CHECK(outcome_for_score(20.0) == OutcomeLevel::Moderate);
  CHECK(outcome_for_score(20.0 + 1e-12) == OutcomeLevel::Moderate);
  CHECK(outcome_for_score(20.001) == OutcomeLevel::Critical);
  CHECK(outcome_for_score(36.0) == OutcomeLevel::Critical);
  CHECK(outcome_for_score(36.001) == OutcomeLevel::VeryCritical);
  // One Medium among six scores 45/6, still VeryLow; two score 60/6, Low.
  CHECK(expected_weighted(rv_of({L::Medium, L::Low, L::Low, L::Low, L::Low, L::Low}), WeightVector{}) ==
        OutcomeLevel::VeryLow);
  CHECK(expected_weighted(rv_of({L::Medium, L::Medium, L::Low, L::Low, L::Low, L::Low}), WeightVector{}) ==
        OutcomeLevel::Low);
  // Two Medium over two active sensors sits on the 20 edge.
  CHECK(expected_weighted(rv_of({L::Medium, std::nullopt, L::Medium, std::nullopt, std::nullopt, std::nullopt}),
                          WeightVector{}) == OutcomeLevel::Moderate);
}

TEST_CASE("weighted oracle is monotone in each sensor's level") {
  Rng rng(23);
  for (int i = 0; i < 2000; ++i) {
    const RiskVector rv = random_rv(rng, true);
    WeightVector w;
    for (auto& x : w.w) x = 1.0 + rng.uniform01();
    const int base = id(expected_weighted(rv, w));
    for (std::size_t s = 0; s < kSensorCount; ++s) {
      if (!rv.levels[s] || *rv.levels[s] == L::High) continue;
      RiskVector up = rv;
      up.levels[s] = static_cast<RiskLevel>(static_cast<int>(*rv.levels[s]) + 1);
      CHECK(id(expected_weighted(up, w)) >= base);
    }
  }
}

TEST_CASE("compare") {
  CHECK(compare(OutcomeLevel::VeryLow, OutcomeLevel::Low));
  CHECK_FALSE(compare(OutcomeLevel::VeryLow, OutcomeLevel::Moderate));
  CHECK(compare(OutcomeLevel::Critical, OutcomeLevel::Critical));
  CHECK(compare(OutcomeLevel::VeryLow, OutcomeLevel::Moderate, 3));
  CHECK_FALSE(compare(OutcomeLevel::Low, OutcomeLevel::Low, 0));
  for (int a = 1; a <= 5; ++a) {
    for (int b = 1; b <= 5; ++b) {
      CHECK(compare(outcome_from_id(a), outcome_from_id(b)) == compare(outcome_from_id(b), outcome_from_id(a)));
    }
  }
}

TEST_CASE("risk vectors from DSRs") {
  Dsr d;
  d.at(SensorKind::Oxi).value = 50.0;
  d.at(SensorKind::Term).value = 37.0;
  const RiskVector rv = to_risk_vector(d, RiskRangeTable::standard());
  CHECK(rv.active_count() == 2);
  CHECK(rv[SensorKind::Oxi] == L::High);
  CHECK(rv[SensorKind::Term] == L::Low);
  CHECK_FALSE(rv[SensorKind::Glc].has_value());
}
