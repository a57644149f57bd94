#pragma once

// Field data ingestion, DTMC derivation per patient profile, a synthetic
// dataset generator in the same schema, and the profile-model file.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "adapta/core_model.hpp"
#include "adapta/dtmc.hpp"

namespace adapta {

struct FieldDataset {
  std::vector<PatientRecord> records;

  friend bool operator==(const FieldDataset&, const FieldDataset&) = default;
};

inline constexpr const char* kAdmissionsFile = "admissions.csv";
inline constexpr const char* kSeriesFile = "series.csv";

/// Parses the admissions and series CSV streams. Series samples are ordered
/// by t_offset_s within each record and sensor; records keep admission order.
///
/// Throws ParseError ("<source>:<line>: ...") on malformed rows and
/// DomainError naming the record on out-of-domain values.
FieldDataset parse_field_data(std::istream& admissions, std::istream& series,
                              const RiskRangeTable& table = RiskRangeTable::standard());

/// Reads admissions.csv and series.csv from `dir`.
FieldDataset load_field_data(const std::filesystem::path& dir,
                             const RiskRangeTable& table = RiskRangeTable::standard());

void write_field_data(const FieldDataset& data, std::ostream& admissions, std::ostream& series);
void save_field_data(const FieldDataset& data, const std::filesystem::path& dir);

struct TransitionCounts {
  SensorKind sensor = SensorKind::Oxi;
  std::vector<Band> states;
  /// Row-major, states x states.
  std::vector<std::uint64_t> counts;
  /// Set when the series had fewer than two samples.
  bool insufficient = false;

  std::size_t size() const { return states.size(); }
  std::uint64_t at(std::size_t from, std::size_t to) const { return counts[from * size() + to]; }
  std::uint64_t total() const;
  TransitionCounts& operator+=(const TransitionCounts& other);

  friend bool operator==(const TransitionCounts&, const TransitionCounts&) = default;
};

TransitionCounts empty_counts(SensorKind sensor, const RiskRangeTable& table);

/// Counts band-to-band transitions between consecutive samples.
TransitionCounts derive_counts(std::span<const double> series, SensorKind sensor,
                               const RiskRangeTable& table);

/// Row-sum normalisation; rows without observations become uniform.
Dtmc normalize(const TransitionCounts& counts);

struct DerivedModels {
  std::vector<ProfileModel> models;  // one per profile, in kAllProfiles order
  std::vector<std::string> warnings;
};

/// Pools every record into its Age, BMI and ICU profile and normalises the
/// summed counts. Profiles without records get uniform chains and a warning.
DerivedModels build_profile_models(const FieldDataset& data,
                                   const RiskRangeTable& table = RiskRangeTable::standard());

/// Deterministic stand-in for ICU field data. With n_records >= 13 every
/// profile receives at least one record.
FieldDataset generate_synthetic_dataset(std::uint64_t seed, int n_records, int samples_per_record);

inline constexpr const char* kModelFormatVersion = "1";

void write_profile_models(const std::vector<ProfileModel>& models, std::ostream& sink);
/// Throws ParseError on schema violations and ValidationError on broken
/// model invariants (non-stochastic rows, missing sensors, bad bands).
std::vector<ProfileModel> read_profile_models(std::istream& source);

void save_profile_models(const std::vector<ProfileModel>& models, const std::filesystem::path& file);
std::vector<ProfileModel> load_profile_models(const std::filesystem::path& file);

}  // namespace adapta
