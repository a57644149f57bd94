#pragma once

// Domain vocabulary: sensors, risk levels, readings, outcomes and patient
// profiles, plus risk classification and profile categorisation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adapta {

enum class SensorKind : std::uint8_t { Oxi, Ecg, Term, Abps, Abpd, Glc };

inline constexpr std::size_t kSensorCount = 6;
inline constexpr std::array<SensorKind, kSensorCount> kAllSensors = {
    SensorKind::Oxi,  SensorKind::Ecg,  SensorKind::Term,
    SensorKind::Abps, SensorKind::Abpd, SensorKind::Glc};

constexpr std::size_t index_of(SensorKind s) { return static_cast<std::size_t>(s); }

std::string_view sensor_name(SensorKind s);
/// Unit tag: "%", "bpm", "degC", "mmHg" or "mg/dL".
std::string_view sensor_unit(SensorKind s);
std::optional<SensorKind> parse_sensor(std::string_view name);

enum class RiskLevel : std::uint8_t { Low = 0, Medium = 1, High = 2 };

std::string_view risk_name(RiskLevel r);
std::optional<RiskLevel> parse_risk(std::string_view name);

/// Patient risk as reported by the BSN or predicted by an oracle.
enum class OutcomeLevel : int {
  VeryLow = 1,
  Low = 2,
  Moderate = 3,
  Critical = 4,
  VeryCritical = 5,
};

constexpr int id(OutcomeLevel o) { return static_cast<int>(o); }
/// Clamps into [1, 5].
OutcomeLevel outcome_from_id(int id);
std::string_view outcome_name(OutcomeLevel o);

struct Band {
  double lo;
  double hi;
  RiskLevel level;

  friend bool operator==(const Band&, const Band&) = default;
};

/// Per-sensor contiguous value bands, ascending by value.
///
/// A value sitting exactly on the boundary of two bands belongs to the
/// riskier one. The outermost thresholds are the sensor's domain.
class RiskRangeTable {
 public:
  /// Throws ValidationError when a sensor's bands are not contiguous,
  /// have the wrong count, or lack exactly one Low band.
  explicit RiskRangeTable(std::array<std::vector<Band>, kSensorCount> bands);

  /// Built-in thresholds used by the reference BSN.
  static const RiskRangeTable& standard();

  const std::vector<Band>& bands(SensorKind s) const { return bands_[index_of(s)]; }
  double domain_lo(SensorKind s) const { return bands(s).front().lo; }
  double domain_hi(SensorKind s) const { return bands(s).back().hi; }
  bool in_domain(SensorKind s, double v) const;
  /// Index of the band owning v. Throws DomainError outside the domain.
  std::size_t band_index(SensorKind s, double v) const;
  std::size_t low_band_index(SensorKind s) const;

  friend bool operator==(const RiskRangeTable&, const RiskRangeTable&) = default;

 private:
  std::array<std::vector<Band>, kSensorCount> bands_;
};

RiskLevel classify_risk(SensorKind sensor, double value, const RiskRangeTable& table);

/// One sensor's reading. An empty value means the sensor is deactivated.
struct Reading {
  SensorKind sensor = SensorKind::Oxi;
  std::optional<double> value;

  bool deactivated() const { return !value.has_value(); }
  friend bool operator==(const Reading&, const Reading&) = default;
};

enum class Profile : std::uint8_t {
  Youth,
  Adult,
  Elderly,
  Underweight,
  NormalWeight,
  Overweight,
  Obesity1,
  Obesity2,
  Obesity3,
  CardiacSurgeryUnit,
  CoronaryCareUnit,
  MedicalICU,
  SurgicalICU,
};

inline constexpr std::size_t kProfileCount = 13;
extern const std::array<Profile, kProfileCount> kAllProfiles;
extern const std::array<Profile, 6> kBmiProfiles;

enum class ProfileDimension : std::uint8_t { Age, Bmi, Icu };

ProfileDimension dimension_of(Profile p);
std::string_view profile_name(Profile p);
std::optional<Profile> parse_profile(std::string_view name);
constexpr std::size_t index_of(Profile p) { return static_cast<std::size_t>(p); }

/// DTMC sensor reading: the simulated vital signs for one tick.
struct Dsr {
  std::int64_t tick = 0;
  Profile profile = Profile::Youth;
  std::array<Reading, kSensorCount> readings{};

  Dsr();
  const Reading& at(SensorKind s) const { return readings[index_of(s)]; }
  Reading& at(SensorKind s) { return readings[index_of(s)]; }
  friend bool operator==(const Dsr&, const Dsr&) = default;
};

struct Sample {
  double t_offset_s;
  double value;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct PatientRecord {
  std::string record_id;
  int age = 0;
  std::string gender;
  double height_m = 0;
  double weight_kg = 0;
  Profile icu = Profile::MedicalICU;
  std::array<std::vector<Sample>, kSensorCount> series{};

  friend bool operator==(const PatientRecord&, const PatientRecord&) = default;
};

double compute_bmi(double weight_kg, double height_m);
Profile bmi_profile(double bmi);
/// Throws DomainError for ages below 16.
Profile age_profile(int age);
/// Accepts the profile names and the short forms CSRU, CCU, MICU, SICU.
std::optional<Profile> parse_icu(std::string_view label);

/// Exactly one Age, one BMI and one ICU profile, in that order.
std::array<Profile, 3> categorize(const PatientRecord& record);

enum class Scenario : std::uint8_t { S1, S2, S3 };
enum class Mode : std::uint8_t { Adaptive, Baseline };

std::string_view scenario_name(Scenario s);  // "s1", "s2", "s3"
std::optional<Scenario> parse_scenario(std::string_view s);
std::string_view mode_name(Mode m);  // "adaptive", "baseline"
std::optional<Mode> parse_mode(std::string_view s);

}  // namespace adapta
