// Python bindings. Enumerations cross the boundary as their names
// ("Oxi", "Medium", "Obesity3", "s2"), outcomes as their integer IDs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fmt/format.h>

#include "adapta/cli.hpp"
#include "adapta/errors.hpp"
#include "adapta/ingest.hpp"
#include "adapta/oracle.hpp"
#include "adapta/stats.hpp"

namespace py = pybind11;
using namespace adapta;

namespace {

template <class T>
T parse_or_throw(std::optional<T> parsed, std::string_view what, std::string_view text) {
  if (!parsed) throw UsageError(fmt::format("unknown {} '{}'", what, text));
  return *parsed;
}

SensorKind to_sensor(const std::string& s) { return parse_or_throw(parse_sensor(s), "sensor", s); }
Profile to_profile(const std::string& s) { return parse_or_throw(parse_profile(s), "profile", s); }
Scenario to_scenario(const std::string& s) { return parse_or_throw(parse_scenario(s), "scenario", s); }
Mode to_mode(const std::string& s) { return parse_or_throw(parse_mode(s), "mode", s); }

// Accepts six risk names (or None) in sensor order, or a dict keyed by
// sensor name where missing sensors count as deactivated.
RiskVector to_risks(const py::object& obj) {
  RiskVector rv;
  auto set = [&](SensorKind s, const py::handle& v) {
    if (v.is_none()) return;
    const auto name = v.cast<std::string>();
    rv[s] = parse_or_throw(parse_risk(name), "risk level", name);
  };
  if (py::isinstance<py::dict>(obj)) {
    for (const auto& [k, v] : obj.cast<py::dict>()) set(to_sensor(k.cast<std::string>()), v);
    return rv;
  }
  const auto seq = obj.cast<py::sequence>();
  if (seq.size() != kSensorCount) throw UsageError("expected one risk level per sensor (6)");
  for (std::size_t i = 0; i < kSensorCount; ++i) set(kAllSensors[i], seq[i]);
  return rv;
}

py::dict mw_dict(const MannWhitneyResult& r) {
  py::dict d;
  d["u"] = r.u;
  d["p_exact"] = r.p_exact ? py::cast(*r.p_exact) : py::none();
  d["p_normal"] = r.p_normal;
  return d;
}

}  // namespace

PYBIND11_MODULE(_adapta, m) {
  m.doc() = "Self-adaptive field testing of a body sensor network";

  auto& base = py::register_exception<Error>(m, "AdaptaError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<OracleUndefined>(m, "OracleUndefined", base.ptr());

  m.attr("SENSORS") = [] {
    py::list l;
    for (auto s : kAllSensors) l.append(std::string(sensor_name(s)));
    return l;
  }();
  m.attr("PROFILES") = [] {
    py::list l;
    for (auto p : kAllProfiles) l.append(std::string(profile_name(p)));
    return l;
  }();

  m.def(
      "classify_risk",
      [](const std::string& sensor, double value) {
        return std::string(risk_name(classify_risk(to_sensor(sensor), value, RiskRangeTable::standard())));
      },
      py::arg("sensor"), py::arg("value"));

  m.def(
      "expected_default", [](const py::object& levels) { return id(expected_default(to_risks(levels))); },
      py::arg("levels"));
  m.def(
      "overall_score",
      [](const py::object& levels, std::optional<std::string> profile) {
        return overall_score(to_risks(levels), profile ? weights_for(to_profile(*profile)) : WeightVector{});
      },
      py::arg("levels"), py::arg("profile") = py::none());
  m.def(
      "expected_weighted",
      [](const py::object& levels, std::optional<std::string> profile) {
        return id(expected_weighted(to_risks(levels), profile ? weights_for(to_profile(*profile)) : WeightVector{}));
      },
      py::arg("levels"), py::arg("profile") = py::none());
  m.def(
      "compare",
      [](int expected, int actual, int threshold) {
        if (expected < 1 || expected > 5 || actual < 1 || actual > 5) throw DomainError("outcome IDs run from 1 to 5");
        return compare(outcome_from_id(expected), outcome_from_id(actual), threshold);
      },
      py::arg("expected"), py::arg("actual"), py::arg("threshold") = kDefaultCompareThreshold);

  m.def(
      "ptcr",
      [](const std::vector<bool>& passes) {
        std::vector<Verdict> v(passes.size());
        for (std::size_t i = 0; i < passes.size(); ++i) v[i].pass = passes[i];
        return ptcr(v);
      },
      py::arg("passes"));
  m.def(
      "mann_whitney_u",
      [](std::vector<double> a, std::vector<double> b) {
        return mw_dict(mann_whitney_u({"a", std::move(a)}, {"b", std::move(b)}));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "a12", [](std::vector<double> a, std::vector<double> b) { return a12({"a", std::move(a)}, {"b", std::move(b)}); },
      py::arg("a"), py::arg("b"));
  m.def(
      "std_dev", [](const std::vector<double>& v) { return std_dev(v); }, py::arg("values"));

  m.def(
      "gen_data",
      [](const std::filesystem::path& out, std::uint64_t seed, int records, int samples) {
        cmd_gen_data(seed, records, samples, out);
      },
      py::arg("out"), py::arg("seed") = 1, py::arg("records") = 13, py::arg("samples") = 1000);
  m.def("derive", &cmd_derive, py::arg("data_dir"), py::arg("model_out"),
        "Derives the profile models; returns the derivation warnings.");

  m.def(
      "run_experiment",
      [](const std::filesystem::path& model, const std::filesystem::path& out, const std::vector<std::string>& scenarios,
         const std::vector<std::string>& modes, int reps, std::uint64_t seed, std::uint64_t sut_seed,
         std::int64_t duration, std::optional<double> battery_rate, double misclassify_prob, int jobs) {
        ExperimentSpec spec;
        spec.scenarios.clear();
        for (const auto& s : scenarios) spec.scenarios.push_back(to_scenario(s));
        spec.modes.clear();
        for (const auto& md : modes) spec.modes.push_back(to_mode(md));
        spec.repetitions = reps;
        spec.patient_seed = seed;
        spec.sut_seed = sut_seed;
        spec.duration = duration;
        spec.battery_rate = battery_rate;
        spec.misclassify_prob = misclassify_prob;
        spec.jobs = jobs;
        RunOutputs result;
        {
          py::gil_scoped_release release;
          result = cmd_run(spec, model, out);
        }
        py::dict d;
        d["logs"] = result.logs;
        d["summary"] = render_summary(result.report);
        py::dict means;
        for (const auto& s : result.report.scenarios) {
          py::dict row;
          row["baseline"] = s.overall.baseline ? py::cast(s.overall.baseline->mean) : py::none();
          row["adaptive"] = s.overall.adaptive ? py::cast(s.overall.adaptive->mean) : py::none();
          row["a12"] = s.overall.a12 ? py::cast(*s.overall.a12) : py::none();
          means[py::str(std::string(scenario_name(s.scenario)))] = row;
        }
        d["ptcr"] = means;
        return d;
      },
      py::arg("model"), py::arg("out"), py::arg("scenarios") = std::vector<std::string>{"s1", "s2", "s3"},
      py::arg("modes") = std::vector<std::string>{"baseline", "adaptive"}, py::arg("reps") = 5, py::arg("seed") = 1,
      py::arg("sut_seed") = 101, py::arg("duration") = 3600, py::arg("battery_rate") = py::none(),
      py::arg("misclassify_prob") = 0.05, py::arg("jobs") = 1);

  m.def(
      "report",
      [](const std::filesystem::path& log_dir, const std::filesystem::path& out_dir) {
        return render_summary(cmd_report(log_dir, out_dir));
      },
      py::arg("log_dir"), py::arg("out_dir"));
}
