#include "adapta/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "adapta/errors.hpp"
#include "adapta/rng.hpp"

namespace adapta {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

/// Line-oriented CSV reader that validates the header and tracks line numbers.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source, std::vector<std::string_view> header)
      : in_(in), source_(std::move(source)) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      const auto fields = split_csv(line);
      if (fields != header) {
        throw ParseError(fmt::format("{}:{}: unexpected header '{}'", source_, line_no_, line));
      }
      return;
    }
    throw ParseError(fmt::format("{}: missing header", source_));
  }

  /// Next non-blank row, or false at end of input.
  bool next(std::vector<std::string_view>& fields, std::size_t expected) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (trim(line_).empty()) continue;
      fields = split_csv(line_);
      if (fields.size() != expected) {
        fail(fmt::format("expected {} fields, got {}", expected, fields.size()));
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(fmt::format("{}:{}: {}", source_, line_no_, what));
  }

  template <typename T>
  T number(std::string_view field, const char* name) const {
    T value{};
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end) {
      fail(fmt::format("invalid {} '{}'", name, field));
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) fail(fmt::format("invalid {} '{}'", name, field));
    }
    return value;
  }

 private:
  std::istream& in_;
  std::string source_;
  std::string line_;
  std::size_t line_no_ = 0;
};

std::string format_number(double v) { return fmt::format("{}", v); }

double round_to(double v, double step) { return std::round(v / step) * step; }

}  // namespace

// ---------------------------------------------------------------------------
// Field data
// ---------------------------------------------------------------------------

FieldDataset parse_field_data(std::istream& admissions, std::istream& series,
                              const RiskRangeTable& table) {
  FieldDataset data;
  std::unordered_map<std::string, std::size_t> by_id;
  std::vector<std::string_view> f;

  CsvReader adm(admissions, kAdmissionsFile,
                {"record_id", "age", "gender", "height_m", "weight_kg", "icu"});
  while (adm.next(f, 6)) {
    PatientRecord r;
    r.record_id = std::string(f[0]);
    if (r.record_id.empty()) adm.fail("empty record_id");
    if (by_id.count(r.record_id)) adm.fail(fmt::format("duplicate record_id '{}'", r.record_id));
    r.age = adm.number<int>(f[1], "age");
    r.gender = std::string(f[2]);
    r.height_m = adm.number<double>(f[3], "height_m");
    r.weight_kg = adm.number<double>(f[4], "weight_kg");
    const auto icu = parse_icu(f[5]);
    if (!icu) adm.fail(fmt::format("unknown ICU label '{}'", f[5]));
    r.icu = *icu;
    if (r.age < 16) {
      throw DomainError(fmt::format("record {}: age {} below 16", r.record_id, r.age));
    }
    if (!(r.height_m > 0) || !(r.weight_kg > 0)) {
      throw DomainError(fmt::format("record {}: height and weight must be positive", r.record_id));
    }
    by_id.emplace(r.record_id, data.records.size());
    data.records.push_back(std::move(r));
  }

  CsvReader ser(series, kSeriesFile, {"record_id", "t_offset_s", "sensor", "value"});
  while (ser.next(f, 4)) {
    const auto it = by_id.find(std::string(f[0]));
    if (it == by_id.end()) ser.fail(fmt::format("unknown record_id '{}'", f[0]));
    const double t = ser.number<double>(f[1], "t_offset_s");
    const auto sensor = parse_sensor(f[2]);
    if (!sensor) ser.fail(fmt::format("unknown sensor '{}'", f[2]));
    const double v = ser.number<double>(f[3], "value");
    auto& record = data.records[it->second];
    if (!table.in_domain(*sensor, v)) {
      throw DomainError(fmt::format("record {}: {} value {} outside domain [{}, {}]",
                                    record.record_id, sensor_name(*sensor), v,
                                    table.domain_lo(*sensor), table.domain_hi(*sensor)));
    }
    record.series[index_of(*sensor)].push_back({t, v});
  }

  for (auto& r : data.records) {
    for (auto& s : r.series) {
      std::stable_sort(s.begin(), s.end(),
                       [](const Sample& a, const Sample& b) { return a.t_offset_s < b.t_offset_s; });
    }
  }
  return data;
}

FieldDataset load_field_data(const std::filesystem::path& dir, const RiskRangeTable& table) {
  std::ifstream adm(dir / kAdmissionsFile);
  std::ifstream ser(dir / kSeriesFile);
  if (!adm || !ser) {
    throw ParseError(fmt::format("{}: expected {} and {}", dir.string(), kAdmissionsFile,
                                 kSeriesFile));
  }
  return parse_field_data(adm, ser, table);
}

void write_field_data(const FieldDataset& data, std::ostream& admissions, std::ostream& series) {
  admissions << "record_id,age,gender,height_m,weight_kg,icu\n";
  series << "record_id,t_offset_s,sensor,value\n";
  for (const auto& r : data.records) {
    admissions << fmt::format("{},{},{},{},{},{}\n", r.record_id, r.age, r.gender,
                              format_number(r.height_m), format_number(r.weight_kg),
                              profile_name(r.icu));
    for (auto s : kAllSensors) {
      for (const auto& sample : r.series[index_of(s)]) {
        series << fmt::format("{},{},{},{}\n", r.record_id, format_number(sample.t_offset_s),
                              sensor_name(s), format_number(sample.value));
      }
    }
  }
}

void save_field_data(const FieldDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream adm(dir / kAdmissionsFile, std::ios::binary);
  std::ofstream ser(dir / kSeriesFile, std::ios::binary);
  if (!adm || !ser) throw Error(fmt::format("cannot write into {}", dir.string()));
  write_field_data(data, adm, ser);
  if (!adm.flush() || !ser.flush()) throw Error(fmt::format("write to {} failed", dir.string()));
}

// ---------------------------------------------------------------------------
// Transition counting and normalisation
// ---------------------------------------------------------------------------

std::uint64_t TransitionCounts::total() const {
  std::uint64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

TransitionCounts& TransitionCounts::operator+=(const TransitionCounts& other) {
  if (other.sensor != sensor || other.states != states) {
    throw UsageError("cannot add transition counts over different state spaces");
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  insufficient = insufficient && other.insufficient;
  return *this;
}

TransitionCounts empty_counts(SensorKind sensor, const RiskRangeTable& table) {
  TransitionCounts tc;
  tc.sensor = sensor;
  tc.states = table.bands(sensor);
  tc.counts.assign(tc.size() * tc.size(), 0);
  return tc;
}

TransitionCounts derive_counts(std::span<const double> series, SensorKind sensor,
                               const RiskRangeTable& table) {
  TransitionCounts tc = empty_counts(sensor, table);
  if (series.size() < 2) {
    tc.insufficient = true;
    // Still reject out-of-domain input.
    for (double v : series) table.band_index(sensor, v);
    return tc;
  }
  std::size_t prev = table.band_index(sensor, series[0]);
  for (std::size_t k = 1; k < series.size(); ++k) {
    const std::size_t cur = table.band_index(sensor, series[k]);
    ++tc.counts[prev * tc.size() + cur];
    prev = cur;
  }
  return tc;
}

Dtmc normalize(const TransitionCounts& counts) {
  Dtmc d;
  d.states = counts.states;
  const std::size_t n = counts.size();
  d.p.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t row_total = 0;
    for (std::size_t j = 0; j < n; ++j) row_total += counts.at(i, j);
    for (std::size_t j = 0; j < n; ++j) {
      d.p[i * n + j] = row_total == 0 ? 1.0 / static_cast<double>(n)
                                      : static_cast<double>(counts.at(i, j)) /
                                            static_cast<double>(row_total);
    }
  }
  return d;
}

DerivedModels build_profile_models(const FieldDataset& data, const RiskRangeTable& table) {
  if (data.records.empty()) throw ValidationError("field dataset has no records");

  std::array<std::array<TransitionCounts, kSensorCount>, kProfileCount> pooled;
  std::array<std::size_t, kProfileCount> members{};
  for (auto p : kAllProfiles) {
    for (auto s : kAllSensors) pooled[index_of(p)][index_of(s)] = empty_counts(s, table);
  }

  // Reduce in record_id order so the result does not depend on input order.
  std::vector<const PatientRecord*> ordered;
  ordered.reserve(data.records.size());
  for (const auto& r : data.records) ordered.push_back(&r);
  std::sort(ordered.begin(), ordered.end(),
            [](const PatientRecord* a, const PatientRecord* b) { return a->record_id < b->record_id; });

  std::vector<double> values;
  for (const PatientRecord* r : ordered) {
    const auto profiles = categorize(*r);
    for (auto s : kAllSensors) {
      const auto& samples = r->series[index_of(s)];
      values.clear();
      for (const auto& sample : samples) values.push_back(sample.value);
      const TransitionCounts tc = derive_counts(values, s, table);
      for (auto p : profiles) pooled[index_of(p)][index_of(s)] += tc;
    }
    for (auto p : profiles) ++members[index_of(p)];
  }

  DerivedModels out;
  for (auto p : kAllProfiles) {
    ProfileModel m;
    m.profile = p;
    m.ranges = table;
    for (auto s : kAllSensors) {
      m.chains[index_of(s)] = normalize(pooled[index_of(p)][index_of(s)]);
      m.chains[index_of(s)].current = table.low_band_index(s);
    }
    if (members[index_of(p)] == 0) {
      out.warnings.push_back(
          fmt::format("profile {} has no records; using uniform chains", profile_name(p)));
    }
    out.models.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

namespace {

struct BmiRange {
  double lo, hi;
};

// Targets sit well inside each category so rounding height and weight to
// clinical precision never moves a record across a boundary.
constexpr std::array<BmiRange, 6> kBmiTargets = {{
    {15.0, 17.8}, {19.2, 24.3}, {25.7, 29.3}, {30.7, 34.3}, {35.7, 39.3}, {40.7, 50.0}}};

constexpr std::array<int, 6> kAgeBounds = {16, 29, 30, 59, 60, 90};

// Severity contributions that drive the generator chains away from Low.
// BMI dominates for heart rate and blood pressure, which is what makes the
// cardiovascular signals of under- and overweight patients the volatile ones.
constexpr std::array<double, 3> kAgeSeverity = {0.0, 0.4, 0.9};
constexpr std::array<double, 6> kBmiSeverity = {5.6, 0.0, 4.8, 8.0, 11.2, 15.2};
constexpr std::array<double, 4> kIcuSeverity = {1.0, 0.8, 0.6, 0.5};

bool bmi_sensitive(SensorKind s) {
  return s == SensorKind::Ecg || s == SensorKind::Abps || s == SensorKind::Abpd;
}

/// Birth-death chain over "distance from Low" (0 Low, 1 Medium, 2 High). On
/// five-band sensors the side of the excursion is chosen when leaving Low.
class GeneratorChain {
 public:
  GeneratorChain(const std::vector<Band>& bands, double severity)
      : bands_(bands), low_(0), state_(0) {
    for (std::size_t i = 0; i < bands_.size(); ++i) {
      if (bands_[i].level == RiskLevel::Low) low_ = i;
    }
    state_ = low_;
    escalate_low_ = 0.001 * (1.0 + severity);
    escalate_mid_ = 0.006 * (1.0 + severity);
  }

  std::size_t step(Rng& rng) {
    const double u = rng.uniform01();
    const RiskLevel level = bands_[state_].level;
    if (level == RiskLevel::Low) {
      if (u < escalate_low_) {
        if (low_ == 0) {
          state_ = 1;
        } else if (low_ + 1 == bands_.size()) {
          state_ = low_ - 1;
        } else {
          state_ = rng.bernoulli(0.5) ? low_ + 1 : low_ - 1;
        }
      }
    } else if (level == RiskLevel::Medium) {
      const bool above = state_ > low_;
      if (u < kRecoverMid) {
        state_ = low_;
      } else if (u < kRecoverMid + escalate_mid_) {
        const std::size_t outer = above ? state_ + 1 : state_ - 1;
        if (outer < bands_.size() && (above || state_ > 0)) state_ = outer;
      }
    } else if (u < kRecoverHigh) {
      state_ = state_ > low_ ? state_ - 1 : state_ + 1;
    }
    return state_;
  }

 private:
  static constexpr double kRecoverMid = 0.15;
  static constexpr double kRecoverHigh = 0.30;

  const std::vector<Band>& bands_;
  std::size_t low_;
  std::size_t state_;
  double escalate_low_;
  double escalate_mid_;
};

double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

}  // namespace

FieldDataset generate_synthetic_dataset(std::uint64_t seed, int n_records, int samples_per_record) {
  if (n_records < 1) throw DomainError("synthetic dataset needs at least one record");
  if (samples_per_record < 2) throw DomainError("synthetic dataset needs at least two samples");

  const RiskRangeTable& table = RiskRangeTable::standard();
  Rng rng(seed);
  FieldDataset data;
  data.records.reserve(static_cast<std::size_t>(n_records));
  const int width = std::max(4, static_cast<int>(std::to_string(n_records).size()));

  for (int i = 0; i < n_records; ++i) {
    // The first 13 records cycle through every category of each dimension.
    const std::size_t age_cat = i < 13 ? static_cast<std::size_t>(i % 3) : rng.below(3);
    const std::size_t bmi_cat = i < 13 ? static_cast<std::size_t>(i % 6) : rng.below(6);
    const std::size_t icu_cat = i < 13 ? static_cast<std::size_t>(i % 4) : rng.below(4);

    PatientRecord r;
    r.record_id = fmt::format("P{:0{}}", i + 1, width);
    const int age_lo = kAgeBounds[2 * age_cat];
    const int age_hi = kAgeBounds[2 * age_cat + 1];
    r.age = age_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(age_hi - age_lo + 1)));
    r.gender = rng.bernoulli(0.5) ? "F" : "M";
    r.height_m = round_to(uniform_in(rng, 1.50, 1.95), 0.01);
    const double bmi = uniform_in(rng, kBmiTargets[bmi_cat].lo, kBmiTargets[bmi_cat].hi);
    r.weight_kg = round_to(bmi * r.height_m * r.height_m, 0.1);
    r.icu = kAllProfiles[9 + icu_cat];

    const double base = kAgeSeverity[age_cat] + kIcuSeverity[icu_cat];
    for (auto s : kAllSensors) {
      const auto& bands = table.bands(s);
      const double severity = base + (bmi_sensitive(s) ? kBmiSeverity[bmi_cat] : 0.0);
      GeneratorChain chain(bands, severity);
      auto& series = r.series[index_of(s)];
      series.reserve(static_cast<std::size_t>(samples_per_record));
      for (int k = 0; k < samples_per_record; ++k) {
        const std::size_t state = k == 0 ? table.low_band_index(s) : chain.step(rng);
        const Band& band = bands[state];
        double v = round_to(uniform_in(rng, band.lo, band.hi), 0.01);
        while (table.band_index(s, v) != state) v = round_to(uniform_in(rng, band.lo, band.hi), 0.01);
        series.push_back({60.0 * k, v});
      }
    }
    data.records.push_back(std::move(r));
  }
  return data;
}

// ---------------------------------------------------------------------------
// Profile-model file
// ---------------------------------------------------------------------------

using nlohmann::ordered_json;

void write_profile_models(const std::vector<ProfileModel>& models, std::ostream& sink) {
  ordered_json doc;
  doc["format_version"] = kModelFormatVersion;
  ordered_json profiles = ordered_json::array();
  for (const auto& m : models) {
    ordered_json pj;
    pj["profile"] = profile_name(m.profile);
    ordered_json sensors = ordered_json::array();
    for (auto s : kAllSensors) {
      const Dtmc& c = m.chain(s);
      ordered_json sj;
      sj["sensor"] = sensor_name(s);
      ordered_json bands = ordered_json::array();
      for (const Band& b : m.ranges.bands(s)) {
        bands.push_back({{"lo", b.lo}, {"hi", b.hi}, {"level", risk_name(b.level)}});
      }
      sj["bands"] = std::move(bands);
      ordered_json rows = ordered_json::array();
      for (std::size_t i = 0; i < c.size(); ++i) {
        const auto row = c.row(i);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
      }
      sj["transitions"] = std::move(rows);
      sensors.push_back(std::move(sj));
    }
    pj["sensors"] = std::move(sensors);
    profiles.push_back(std::move(pj));
  }
  doc["profiles"] = std::move(profiles);
  // nlohmann serialises doubles with max_digits10 (17 significant digits).
  sink << doc.dump(2) << '\n';
}

namespace {

const ordered_json& field(const ordered_json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(fmt::format("{}: missing field '{}'", where, key));
  }
  return obj.at(key);
}

double number_field(const ordered_json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  if (!v.is_number()) throw ParseError(fmt::format("{}: field '{}' is not a number", where, key));
  return v.get<double>();
}

}  // namespace

std::vector<ProfileModel> read_profile_models(std::istream& source) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("profile-model file: {}", e.what()));
  }
  const auto& version = field(doc, "format_version", "profile-model file");
  if (!version.is_string() || version.get<std::string>() != kModelFormatVersion) {
    throw ParseError(fmt::format("profile-model file: unsupported format_version {}", version.dump()));
  }
  const auto& profiles = field(doc, "profiles", "profile-model file");
  if (!profiles.is_array()) throw ParseError("profile-model file: 'profiles' is not an array");

  std::vector<ProfileModel> models;
  for (const auto& pj : profiles) {
    const auto& name = field(pj, "profile", "profile entry");
    if (!name.is_string()) throw ParseError("profile entry: 'profile' is not a string");
    const auto profile = parse_profile(name.get<std::string>());
    if (!profile) throw ParseError(fmt::format("unknown profile '{}'", name.get<std::string>()));
    const std::string where(profile_name(*profile));

    const auto& sensors = field(pj, "sensors", where);
    if (!sensors.is_array()) throw ParseError(fmt::format("{}: 'sensors' is not an array", where));

    std::array<std::vector<Band>, kSensorCount> bands;
    std::array<std::vector<double>, kSensorCount> matrices;
    std::array<bool, kSensorCount> seen{};
    for (const auto& sj : sensors) {
      const auto& sname = field(sj, "sensor", where);
      const auto sensor = sname.is_string() ? parse_sensor(sname.get<std::string>()) : std::nullopt;
      if (!sensor) throw ParseError(fmt::format("{}: unknown sensor {}", where, sname.dump()));
      const std::string swhere = fmt::format("{}/{}", where, sensor_name(*sensor));
      if (seen[index_of(*sensor)]) {
        throw ValidationError(fmt::format("{}: sensor listed twice", swhere));
      }
      seen[index_of(*sensor)] = true;

      const auto& bj = field(sj, "bands", swhere);
      if (!bj.is_array()) throw ParseError(fmt::format("{}: 'bands' is not an array", swhere));
      for (const auto& b : bj) {
        const auto& lvl = field(b, "level", swhere);
        const auto level = lvl.is_string() ? parse_risk(lvl.get<std::string>()) : std::nullopt;
        if (!level) throw ParseError(fmt::format("{}: invalid band level {}", swhere, lvl.dump()));
        bands[index_of(*sensor)].push_back(
            {number_field(b, "lo", swhere), number_field(b, "hi", swhere), *level});
      }

      const auto& tj = field(sj, "transitions", swhere);
      const std::size_t n = bands[index_of(*sensor)].size();
      if (!tj.is_array() || tj.size() != n) {
        throw ValidationError(fmt::format("{}: transition matrix must have {} rows", swhere, n));
      }
      auto& p = matrices[index_of(*sensor)];
      for (const auto& row : tj) {
        if (!row.is_array() || row.size() != n) {
          throw ValidationError(fmt::format("{}: transition rows must have {} entries", swhere, n));
        }
        for (const auto& v : row) {
          if (!v.is_number()) throw ParseError(fmt::format("{}: non-numeric probability", swhere));
          p.push_back(v.get<double>());
        }
      }
    }
    for (auto s : kAllSensors) {
      if (!seen[index_of(s)]) {
        throw ValidationError(fmt::format("{}: missing sensor {}", where, sensor_name(s)));
      }
    }

    ProfileModel m;
    m.profile = *profile;
    m.ranges = RiskRangeTable(bands);
    for (auto s : kAllSensors) {
      Dtmc& c = m.chains[index_of(s)];
      c.states = bands[index_of(s)];
      c.p = std::move(matrices[index_of(s)]);
      c.current = m.ranges.low_band_index(s);
    }
    validate_model(m);
    models.push_back(std::move(m));
  }
  if (models.empty()) throw ValidationError("profile-model file has no profiles");
  for (const auto& m : models) {
    if (m.ranges != models.front().ranges) {
      throw ValidationError(fmt::format("profile {} uses different risk bands than {}",
                                        profile_name(m.profile),
                                        profile_name(models.front().profile)));
    }
  }
  return models;
}

void save_profile_models(const std::vector<ProfileModel>& models, const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", file.string()));
  write_profile_models(models, out);
  if (!out.flush()) throw Error(fmt::format("write to {} failed", file.string()));
}

std::vector<ProfileModel> load_profile_models(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open profile-model file {}", file.string()));
  return read_profile_models(in);
}

}  // namespace adapta
