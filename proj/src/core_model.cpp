#include "adapta/core_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "adapta/errors.hpp"

namespace adapta {

namespace {

constexpr std::array<std::string_view, kSensorCount> kSensorNames = {
    "Oxi", "Ecg", "Term", "Abps", "Abpd", "Glc"};
constexpr std::array<std::string_view, kSensorCount> kSensorUnits = {
    "%", "bpm", "degC", "mmHg", "mmHg", "mg/dL"};

constexpr std::array<std::string_view, kProfileCount> kProfileNames = {
    "Youth",       "Adult",        "Elderly",    "Underweight",
    "NormalWeight", "Overweight",  "Obesity1",   "Obesity2",
    "Obesity3",    "CardiacSurgeryUnit", "CoronaryCareUnit", "MedicalICU",
    "SurgicalICU"};

std::size_t expected_band_count(SensorKind s) {
  switch (s) {
    case SensorKind::Ecg:
    case SensorKind::Term:
    case SensorKind::Glc:
      return 5;
    default:
      return 3;
  }
}

constexpr RiskLevel L = RiskLevel::Low;
constexpr RiskLevel M = RiskLevel::Medium;
constexpr RiskLevel H = RiskLevel::High;

}  // namespace

const std::array<Profile, kProfileCount> kAllProfiles = {
    Profile::Youth,       Profile::Adult,        Profile::Elderly,
    Profile::Underweight, Profile::NormalWeight, Profile::Overweight,
    Profile::Obesity1,    Profile::Obesity2,     Profile::Obesity3,
    Profile::CardiacSurgeryUnit, Profile::CoronaryCareUnit,
    Profile::MedicalICU,  Profile::SurgicalICU};

const std::array<Profile, 6> kBmiProfiles = {
    Profile::Underweight, Profile::NormalWeight, Profile::Overweight,
    Profile::Obesity1,    Profile::Obesity2,     Profile::Obesity3};

std::string_view sensor_name(SensorKind s) { return kSensorNames[index_of(s)]; }
std::string_view sensor_unit(SensorKind s) { return kSensorUnits[index_of(s)]; }

std::optional<SensorKind> parse_sensor(std::string_view name) {
  for (auto s : kAllSensors) {
    if (sensor_name(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view risk_name(RiskLevel r) {
  switch (r) {
    case RiskLevel::Low: return "Low";
    case RiskLevel::Medium: return "Medium";
    case RiskLevel::High: return "High";
  }
  return "?";
}

std::optional<RiskLevel> parse_risk(std::string_view name) {
  if (name == "Low") return RiskLevel::Low;
  if (name == "Medium") return RiskLevel::Medium;
  if (name == "High") return RiskLevel::High;
  return std::nullopt;
}

OutcomeLevel outcome_from_id(int value) {
  return static_cast<OutcomeLevel>(std::clamp(value, 1, 5));
}

std::string_view outcome_name(OutcomeLevel o) {
  switch (o) {
    case OutcomeLevel::VeryLow: return "VeryLow";
    case OutcomeLevel::Low: return "Low";
    case OutcomeLevel::Moderate: return "Moderate";
    case OutcomeLevel::Critical: return "Critical";
    case OutcomeLevel::VeryCritical: return "VeryCritical";
  }
  return "?";
}

RiskRangeTable::RiskRangeTable(std::array<std::vector<Band>, kSensorCount> bands)
    : bands_(std::move(bands)) {
  for (auto s : kAllSensors) {
    const auto& b = bands_[index_of(s)];
    if (b.size() != expected_band_count(s)) {
      throw ValidationError(fmt::format("{}: expected {} bands, got {}", sensor_name(s),
                                        expected_band_count(s), b.size()));
    }
    std::size_t lows = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!(b[i].lo < b[i].hi)) {
        throw ValidationError(fmt::format("{}: band {} has lo >= hi", sensor_name(s), i));
      }
      if (i > 0 && b[i - 1].hi != b[i].lo) {
        throw ValidationError(
            fmt::format("{}: bands {} and {} are not contiguous", sensor_name(s), i - 1, i));
      }
      if (i > 0 && b[i - 1].level == b[i].level) {
        throw ValidationError(
            fmt::format("{}: adjacent bands {} and {} share a level", sensor_name(s), i - 1, i));
      }
      if (b[i].level == RiskLevel::Low) ++lows;
    }
    if (lows != 1) {
      throw ValidationError(fmt::format("{}: expected exactly one Low band", sensor_name(s)));
    }
  }
}

const RiskRangeTable& RiskRangeTable::standard() {
  static const RiskRangeTable table({{
      {{0, 55, H}, {55, 65, M}, {65, 100, L}},                         // Oxi
      {{0, 70, H}, {70, 85, M}, {85, 97, L}, {97, 115, M}, {115, 300, H}},  // Ecg
      {{0, 32, H}, {32, 36, M}, {36, 38, L}, {38, 41, M}, {41, 50, H}},     // Term
      {{0, 120, L}, {120, 140, M}, {140, 300, H}},                     // Abps
      {{0, 80, L}, {80, 90, M}, {90, 300, H}},                         // Abpd
      {{20, 40, H}, {40, 55, M}, {55, 96, L}, {96, 120, M}, {120, 200, H}},  // Glc
  }});
  return table;
}

bool RiskRangeTable::in_domain(SensorKind s, double v) const {
  return v >= domain_lo(s) && v <= domain_hi(s);
}

std::size_t RiskRangeTable::band_index(SensorKind s, double v) const {
  if (!in_domain(s, v)) {
    throw DomainError(fmt::format("{} value {} outside domain [{}, {}]", sensor_name(s), v,
                                  domain_lo(s), domain_hi(s)));
  }
  const auto& b = bands(s);
  std::size_t best = b.size();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (v < b[i].lo || v > b[i].hi) continue;
    if (best == b.size() || b[i].level > b[best].level) best = i;
  }
  return best;
}

std::size_t RiskRangeTable::low_band_index(SensorKind s) const {
  const auto& b = bands(s);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b[i].level == RiskLevel::Low) return i;
  }
  return 0;  // unreachable: enforced by the constructor
}

RiskLevel classify_risk(SensorKind sensor, double value, const RiskRangeTable& table) {
  return table.bands(sensor)[table.band_index(sensor, value)].level;
}

Dsr::Dsr() {
  for (auto s : kAllSensors) readings[index_of(s)].sensor = s;
}

ProfileDimension dimension_of(Profile p) {
  const auto i = index_of(p);
  if (i < 3) return ProfileDimension::Age;
  if (i < 9) return ProfileDimension::Bmi;
  return ProfileDimension::Icu;
}

std::string_view profile_name(Profile p) { return kProfileNames[index_of(p)]; }

std::optional<Profile> parse_profile(std::string_view name) {
  for (auto p : kAllProfiles) {
    if (profile_name(p) == name) return p;
  }
  return std::nullopt;
}

double compute_bmi(double weight_kg, double height_m) {
  if (!(weight_kg > 0) || !(height_m > 0)) {
    throw DomainError(
        fmt::format("BMI needs positive weight and height (got {} kg, {} m)", weight_kg, height_m));
  }
  return weight_kg / (height_m * height_m);
}

Profile bmi_profile(double bmi) {
  if (bmi < 18.5) return Profile::Underweight;
  if (bmi < 25.0) return Profile::NormalWeight;
  if (bmi < 30.0) return Profile::Overweight;
  if (bmi < 35.0) return Profile::Obesity1;
  if (bmi < 40.0) return Profile::Obesity2;
  return Profile::Obesity3;
}

Profile age_profile(int age) {
  if (age < 16) throw DomainError(fmt::format("age {} below 16", age));
  if (age <= 29) return Profile::Youth;
  if (age <= 59) return Profile::Adult;
  return Profile::Elderly;
}

std::optional<Profile> parse_icu(std::string_view label) {
  if (auto p = parse_profile(label); p && dimension_of(*p) == ProfileDimension::Icu) return p;
  if (label == "CSRU") return Profile::CardiacSurgeryUnit;
  if (label == "CCU") return Profile::CoronaryCareUnit;
  if (label == "MICU") return Profile::MedicalICU;
  if (label == "SICU") return Profile::SurgicalICU;
  return std::nullopt;
}

std::array<Profile, 3> categorize(const PatientRecord& record) {
  if (dimension_of(record.icu) != ProfileDimension::Icu) {
    throw DomainError(fmt::format("record {}: {} is not an ICU profile", record.record_id,
                                  profile_name(record.icu)));
  }
  return {age_profile(record.age), bmi_profile(compute_bmi(record.weight_kg, record.height_m)),
          record.icu};
}

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::S1: return "s1";
    case Scenario::S2: return "s2";
    case Scenario::S3: return "s3";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view s) {
  if (s == "s1" || s == "S1") return Scenario::S1;
  if (s == "s2" || s == "S2") return Scenario::S2;
  if (s == "s3" || s == "S3") return Scenario::S3;
  return std::nullopt;
}

std::string_view mode_name(Mode m) { return m == Mode::Adaptive ? "adaptive" : "baseline"; }

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "adaptive") return Mode::Adaptive;
  if (s == "baseline") return Mode::Baseline;
  return std::nullopt;
}

}  // namespace adapta
