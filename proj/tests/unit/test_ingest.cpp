#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "adapta/errors.hpp"
#include "adapta/ingest.hpp"

using namespace adapta;

namespace {

const RiskRangeTable& table() { return RiskRangeTable::standard(); }

constexpr const char* kAdmHeader = "record_id,age,gender,height_m,weight_kg,icu\n";
constexpr const char* kSerHeader = "record_id,t_offset_s,sensor,value\n";

FieldDataset parse(const std::string& adm, const std::string& ser) {
  std::istringstream a(adm), s(ser);
  return parse_field_data(a, s);
}

std::string error_of(const std::string& adm, const std::string& ser) {
  try {
    parse(adm, ser);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

// Independent count of band transitions, classifying by hand.
std::size_t term_state(double v) {
  if (v >= 41) return 4;
  if (v >= 38) return 3;
  if (v > 36) return 2;
  if (v > 32) return 1;
  return 0;
}

}  // namespace

TEST_CASE("parse a minimal dataset") {
  const auto d = parse(std::string(kAdmHeader) + "P1,40,F,1.70,65.0,MICU\n",
                       std::string(kSerHeader) + "P1,120,Term,37.0\nP1,0,Term,36.5\nP1,60,Term,36.7\n");
  REQUIRE(d.records.size() == 1);
  const auto& r = d.records[0];
  CHECK(r.icu == Profile::MedicalICU);
  const auto& term = r.series[index_of(SensorKind::Term)];
  REQUIRE(term.size() == 3);
  CHECK(term[0].t_offset_s == 0);
  CHECK(term[2].value == 37.0);
  CHECK(r.series[index_of(SensorKind::Oxi)].empty());
}

TEST_CASE("parse errors name the file and line") {
  CHECK(error_of(std::string(kAdmHeader) + "P1,40,F,1.70,65.0,MICU\n",
                 std::string(kSerHeader) + "P1,0,Term,36.5\nP1,x,Term,36.5\n")
            .find("series.csv:3") != std::string::npos);
  CHECK(error_of(std::string(kAdmHeader) + "P1,40,F,1.70,65.0,MICU\n", std::string(kSerHeader) + "P1,0,Pulse,1\n")
            .find("unknown sensor") != std::string::npos);
  CHECK(error_of(std::string(kAdmHeader) + "P1,40,F,1.70\n", kSerHeader).find("admissions.csv:2") !=
        std::string::npos);
  CHECK(error_of("id,age\n", kSerHeader).find("header") != std::string::npos);
  CHECK(error_of(std::string(kAdmHeader) + "P1,40,F,1.70,65.0,MICU\nP1,41,F,1.70,65.0,MICU\n", kSerHeader)
            .find("duplicate") != std::string::npos);
}

TEST_CASE("domain errors name the record") {
  CHECK_THROWS_AS(parse(std::string(kAdmHeader) + "P7,40,F,0,65.0,MICU\n", kSerHeader), DomainError);
  CHECK(error_of(std::string(kAdmHeader) + "P7,40,F,0,65.0,MICU\n", kSerHeader).find("P7") != std::string::npos);
  CHECK_THROWS_AS(parse(std::string(kAdmHeader) + "P1,40,F,1.7,65.0,MICU\n", std::string(kSerHeader) + "P1,0,Glc,5\n"),
                  DomainError);
}

TEST_CASE("hand-counted temperature transitions") {
  const std::vector<double> series{36.5, 36.7, 39.0, 40.0, 37.0};
  const auto tc = derive_counts(series, SensorKind::Term, table());
  REQUIRE(tc.size() == 5);
  CHECK_FALSE(tc.insufficient);
  constexpr std::size_t L = 2, M = 3;
  CHECK(tc.at(L, L) == 1);
  CHECK(tc.at(L, M) == 1);
  CHECK(tc.at(M, M) == 1);
  CHECK(tc.at(M, L) == 1);
  CHECK(tc.total() == 4);

  const Dtmc d = normalize(tc);
  CHECK(d.prob(L, L) == 0.5);
  CHECK(d.prob(L, M) == 0.5);
  CHECK(d.prob(M, L) == 0.5);
  CHECK(d.prob(M, M) == 0.5);
  for (std::size_t j = 0; j < 5; ++j) CHECK(d.prob(0, j) == doctest::Approx(0.2));
}

TEST_CASE("degenerate series") {
  const std::vector<double> constant{36.5, 36.5, 36.5};
  const auto tc = derive_counts(constant, SensorKind::Term, table());
  CHECK(tc.at(2, 2) == 2);
  CHECK(tc.total() == 2);

  const std::vector<double> one{36.5};
  CHECK(derive_counts(one, SensorKind::Term, table()).insufficient);
  CHECK(derive_counts(std::vector<double>{}, SensorKind::Term, table()).insufficient);

  auto single = empty_counts(SensorKind::Oxi, table());
  single.counts[2 * 3 + 1] = 7;
  CHECK(normalize(single).prob(2, 1) == 1.0);
}

TEST_CASE("derive_counts agrees with an independent count") {
  Rng rng(99);
  std::vector<double> series;
  for (int i = 0; i < 500; ++i) series.push_back(20.0 + 30.0 * rng.uniform01());
  const auto tc = derive_counts(series, SensorKind::Term, table());
  std::vector<std::uint64_t> expect(25, 0);
  for (std::size_t i = 1; i < series.size(); ++i) ++expect[term_state(series[i - 1]) * 5 + term_state(series[i])];
  CHECK(tc.counts == expect);
}

TEST_CASE("profile models pool records additively") {
  FieldDataset data;
  auto rec = [](std::string id, int age, std::vector<double> term) {
    PatientRecord r;
    r.record_id = std::move(id);
    r.age = age;
    r.height_m = 1.8;
    r.weight_kg = 70;
    r.icu = Profile::SurgicalICU;
    for (std::size_t i = 0; i < term.size(); ++i) r.series[index_of(SensorKind::Term)].push_back({60.0 * i, term[i]});
    return r;
  };
  data.records.push_back(rec("A", 20, {36.5, 39.0, 39.5}));
  data.records.push_back(rec("B", 25, {36.5, 36.6, 39.0}));
  const auto derived = build_profile_models(data);
  REQUIRE(derived.models.size() == 13);
  const Dtmc& youth = derived.models[index_of(Profile::Youth)].chain(SensorKind::Term);
  // L->L 1, L->M 2, M->M 1
  CHECK(youth.prob(2, 2) == doctest::Approx(1.0 / 3));
  CHECK(youth.prob(2, 3) == doctest::Approx(2.0 / 3));
  CHECK(youth.prob(3, 3) == 1.0);

  CHECK(derived.warnings.size() == 10);  // Youth, NormalWeight, SurgicalICU have data
  CHECK(std::any_of(derived.warnings.begin(), derived.warnings.end(),
                    [](const std::string& w) { return w.find("Elderly") != std::string::npos; }));
  const Dtmc& elderly = derived.models[index_of(Profile::Elderly)].chain(SensorKind::Term);
  CHECK(elderly.prob(0, 4) == doctest::Approx(0.2));

  FieldDataset swapped;
  swapped.records = {data.records[1], data.records[0]};
  CHECK(build_profile_models(swapped).models == derived.models);

  CHECK_THROWS_AS(build_profile_models(FieldDataset{}), ValidationError);
}

TEST_CASE("synthetic data is deterministic and covers every profile") {
  const auto a = generate_synthetic_dataset(1, 13, 100);
  const auto b = generate_synthetic_dataset(1, 13, 100);
  CHECK(a == b);
  CHECK_FALSE(a == generate_synthetic_dataset(2, 13, 100));

  std::set<Profile> seen;
  for (const auto& r : a.records) {
    for (auto p : categorize(r)) seen.insert(p);
    for (auto s : kAllSensors) {
      CHECK(r.series[index_of(s)].size() == 100);
      for (const auto& sample : r.series[index_of(s)]) CHECK(table().in_domain(s, sample.value));
    }
  }
  CHECK(seen.size() == 13);
  CHECK_THROWS_AS(generate_synthetic_dataset(1, 13, 1), DomainError);
  CHECK_THROWS_AS(generate_synthetic_dataset(1, 0, 10), DomainError);
}

TEST_CASE("field data survives a write and parse") {
  const auto data = generate_synthetic_dataset(4, 20, 30);
  std::ostringstream adm, ser;
  write_field_data(data, adm, ser);
  std::istringstream a(adm.str()), s(ser.str());
  CHECK(parse_field_data(a, s) == data);
}

TEST_CASE("profile-model file round trip and validation") {
  const auto models = build_profile_models(generate_synthetic_dataset(1, 13, 200)).models;
  std::stringstream buf;
  write_profile_models(models, buf);
  const std::string text = buf.str();
  CHECK(read_profile_models(buf) == models);

  SUBCASE("row that no longer sums to one") {
    auto broken = models;
    broken[0].chains[0].p[0] += 0.1;
    std::stringstream out;
    write_profile_models(broken, out);
    CHECK_THROWS_AS(read_profile_models(out), ValidationError);
  }
  SUBCASE("missing sensor") {
    const auto pos = text.find("\"sensor\": \"Glc\"");
    REQUIRE(pos != std::string::npos);
    // Drop the Glc object from the first profile by renaming it to a duplicate.
    std::string edited = text;
    edited.replace(pos, 15, "\"sensor\": \"Oxi\"");
    std::istringstream in(edited);
    CHECK_THROWS_AS(read_profile_models(in), ValidationError);
  }
  SUBCASE("malformed JSON") {
    std::istringstream in("{\"format_version\": \"1\", \"profiles\": [");
    CHECK_THROWS_AS(read_profile_models(in), ParseError);
  }
  SUBCASE("unsupported version") {
    std::istringstream in("{\"format_version\": \"9\", \"profiles\": []}");
    CHECK_THROWS_AS(read_profile_models(in), ParseError);
  }
}

TEST_CASE("dataset files on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "adapta_unit_ingest";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto data = generate_synthetic_dataset(3, 13, 20);
  save_field_data(data, dir);
  CHECK(load_field_data(dir) == data);
  std::filesystem::remove(dir / kSeriesFile);
  CHECK_THROWS_AS(load_field_data(dir), ParseError);
  std::filesystem::remove_all(dir);
}
