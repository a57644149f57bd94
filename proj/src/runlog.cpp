#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "adapta/errors.hpp"
#include "adapta/harness.hpp"

namespace adapta {

namespace {

constexpr std::string_view kColumns =
    "tick,profile,Oxi,Ecg,Term,Abps,Abpd,Glc,bsn_outcome,expected_outcome,pass,events";

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_schedule(const ProfileSchedule& s) {
  std::string out;
  for (const auto& [p, d] : s.segments()) {
    if (!out.empty()) out += ';';
    out += fmt::format("{}:{}", profile_name(p), d);
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(fmt::format("{}:{}: {}", source_, line_, what));
  }
  void set_line(std::size_t line) { line_ = line; }

  template <class T>
  T number(std::string_view text, std::string_view field) const {
    T v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || text.empty()) {
      fail(fmt::format("bad {} '{}'", field, text));
    }
    return v;
  }

  Profile profile(std::string_view text) const {
    const auto p = parse_profile(text);
    if (!p) fail(fmt::format("unknown profile '{}'", text));
    return *p;
  }

  OutcomeLevel outcome(std::string_view text) const {
    const int v = number<int>(text, "outcome");
    if (v < 1 || v > 5) fail(fmt::format("outcome {} outside 1..5", v));
    return outcome_from_id(v);
  }

  bool flag(std::string_view text, std::string_view field) const {
    if (text == "1" || text == "true") return true;
    if (text == "0" || text == "false") return false;
    fail(fmt::format("bad {} '{}'", field, text));
  }

 private:
  std::string source_;
  std::size_t line_ = 0;
};

}  // namespace

void write_runlog(const RunLog& log, std::ostream& out) {
  const RunConfig& c = log.config;
  const auto& d = c.sut.drain_factor;
  out << fmt::format("# format_version={}\n", kRunLogVersion);
  out << fmt::format("# scenario={}\n", scenario_name(c.scenario));
  out << fmt::format("# mode={}\n", mode_name(c.mode));
  out << fmt::format("# repetition={}\n", c.repetition);
  out << fmt::format("# patient_seed={}\n", c.patient_seed);
  out << fmt::format("# sut_seed={}\n", c.sut_seed);
  out << fmt::format("# schedule={}\n", format_schedule(c.schedule));
  out << fmt::format("# battery_rate={}\n", c.sut.battery_rate);
  out << fmt::format("# instant_recharge={}\n", c.sut.instant_recharge ? 1 : 0);
  out << fmt::format("# deactivate_at={}\n", c.sut.deactivate_at);
  out << fmt::format("# reactivate_at={}\n", c.sut.reactivate_at);
  out << fmt::format("# drain_factor={},{},{},{},{},{}\n", d[0], d[1], d[2], d[3], d[4], d[5]);
  out << fmt::format("# stale_hold={}\n", c.sut.faults.stale_hold ? 1 : 0);
  out << fmt::format("# misclassify_prob={}\n", c.sut.faults.misclassify_prob);
  out << fmt::format("# test_window={}\n", c.test_window);
  out << fmt::format("# pause={}\n", c.pause);
  out << fmt::format("# threshold={}\n", c.threshold);
  out << fmt::format("# ticks={}\n", log.entries.size());
  out << fmt::format("# test_cases_dsr={}\n", log.tested_dsrs());
  out << fmt::format("# test_cases_readings={}\n", log.tested_readings());
  out << fmt::format("# untestable={}\n", log.untestable);
  out << fmt::format("# adaptations={}\n", log.ledger.size());
  out << kColumns << '\n';

  std::string row;
  for (const auto& e : log.entries) {
    row.clear();
    fmt::format_to(std::back_inserter(row), "{},{}", e.tick, profile_name(e.profile));
    for (const auto& r : e.readings.readings) {
      if (r.value) {
        fmt::format_to(std::back_inserter(row), ",{}", *r.value);
      } else {
        row += ",DEACT";
      }
    }
    fmt::format_to(std::back_inserter(row), ",{},", id(e.bsn));
    if (e.expected) row += std::to_string(id(*e.expected));
    row += ',';
    if (e.pass) row += *e.pass ? '1' : '0';
    row += ',';
    for (std::size_t i = 0; i < e.events.size(); ++i) {
      if (i) row += ';';
      row += e.events[i];
    }
    row += '\n';
    out << row;
  }
}

RunLog read_runlog(std::istream& in, const std::string& source) {
  Parser p(source);
  std::map<std::string, std::string, std::less<>> header;
  std::string line;
  std::size_t lineno = 0;
  bool saw_columns = false;

  while (std::getline(in, line)) {
    ++lineno;
    p.set_line(lineno);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) p.fail("header line without '='");
      header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (line != kColumns) p.fail("unexpected column header");
    saw_columns = true;
    break;
  }
  if (!saw_columns) p.fail("missing column header");

  auto get = [&](std::string_view key) -> const std::string& {
    const auto it = header.find(key);
    if (it == header.end()) p.fail(fmt::format("missing header field '{}'", key));
    return it->second;
  };

  if (get("format_version") != kRunLogVersion) {
    p.fail(fmt::format("unsupported format_version '{}'", get("format_version")));
  }

  RunLog log;
  RunConfig& c = log.config;
  const auto scenario = parse_scenario(get("scenario"));
  if (!scenario) p.fail(fmt::format("unknown scenario '{}'", get("scenario")));
  c.scenario = *scenario;
  const auto mode = parse_mode(get("mode"));
  if (!mode) p.fail(fmt::format("unknown mode '{}'", get("mode")));
  c.mode = *mode;
  c.repetition = p.number<int>(get("repetition"), "repetition");
  c.patient_seed = p.number<std::uint64_t>(get("patient_seed"), "patient_seed");
  c.sut_seed = p.number<std::uint64_t>(get("sut_seed"), "sut_seed");

  std::vector<ProfileSchedule::Segment> segments;
  for (const auto& seg : split(get("schedule"), ';')) {
    const auto colon = seg.find(':');
    if (colon == std::string::npos) p.fail(fmt::format("bad schedule segment '{}'", seg));
    segments.emplace_back(p.profile(std::string_view(seg).substr(0, colon)),
                          p.number<std::int64_t>(std::string_view(seg).substr(colon + 1), "duration"));
  }
  try {
    c.schedule = ProfileSchedule(std::move(segments));
  } catch (const ConfigError& e) {
    p.fail(e.what());
  }

  c.sut.battery_rate = p.number<double>(get("battery_rate"), "battery_rate");
  c.sut.instant_recharge = p.flag(get("instant_recharge"), "instant_recharge");
  c.sut.deactivate_at = p.number<double>(get("deactivate_at"), "deactivate_at");
  c.sut.reactivate_at = p.number<double>(get("reactivate_at"), "reactivate_at");
  const auto drains = split(get("drain_factor"), ',');
  if (drains.size() != kSensorCount) p.fail("drain_factor needs one value per sensor");
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    c.sut.drain_factor[i] = p.number<double>(drains[i], "drain_factor");
  }
  c.sut.faults.stale_hold = p.flag(get("stale_hold"), "stale_hold");
  c.sut.faults.misclassify_prob = p.number<double>(get("misclassify_prob"), "misclassify_prob");
  c.test_window = p.number<std::int64_t>(get("test_window"), "test_window");
  c.pause = p.number<std::int64_t>(get("pause"), "pause");
  c.threshold = p.number<int>(get("threshold"), "threshold");
  log.untestable = p.number<std::int64_t>(get("untestable"), "untestable");
  const auto ticks = p.number<std::size_t>(get("ticks"), "ticks");

  while (std::getline(in, line)) {
    ++lineno;
    p.set_line(lineno);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12) p.fail(fmt::format("expected 12 fields, got {}", f.size()));

    LogEntry e;
    e.tick = p.number<std::int64_t>(f[0], "tick");
    e.profile = p.profile(f[1]);
    e.readings.tick = e.tick;
    e.readings.profile = e.profile;
    for (std::size_t i = 0; i < kSensorCount; ++i) {
      if (f[2 + i] != "DEACT") e.readings.readings[i].value = p.number<double>(f[2 + i], "reading");
    }
    e.bsn = p.outcome(f[8]);
    if (!f[9].empty()) e.expected = p.outcome(f[9]);
    if (!f[10].empty()) e.pass = p.flag(f[10], "pass");
    if (e.expected.has_value() != e.pass.has_value()) p.fail("expected outcome and verdict must go together");
    if (!f[11].empty()) e.events = split(f[11], ';');

    for (const auto& ev : e.events) {
      if (ev.rfind("Adapt:", 0) != 0) continue;
      const auto colon = ev.find(':', 6);
      if (colon == std::string::npos) p.fail(fmt::format("bad adaptation event '{}'", ev));
      const std::string target = ev.substr(6, colon - 6);
      AdaptTarget t;
      if (target == "TestCases") {
        t = AdaptTarget::TestCases;
      } else if (target == "Oracle") {
        t = AdaptTarget::Oracle;
      } else if (target == "TestStrategy") {
        t = AdaptTarget::TestStrategy;
      } else {
        p.fail(fmt::format("unknown adaptation target '{}'", target));
      }
      log.ledger.push_back({e.tick, t, ev.substr(colon + 1)});
    }
    log.entries.push_back(std::move(e));
  }
  if (log.entries.size() != ticks) {
    throw ParseError(fmt::format("{}: header says {} ticks, found {}", source, ticks, log.entries.size()));
  }
  return log;
}

}  // namespace adapta
