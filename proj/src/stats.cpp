#include "adapta/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "adapta/errors.hpp"

namespace adapta {

std::optional<double> ptcr(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) return std::nullopt;
  const auto passes = std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
  return 100.0 * static_cast<double>(passes) / static_cast<double>(verdicts.size());
}

namespace {

void require_values(const SampleGroup& g) {
  if (g.values.empty()) throw UsageError(fmt::format("sample group '{}' is empty", g.label));
}

double u_statistic(const SampleGroup& a, const SampleGroup& b) {
  double u = 0;
  for (double x : a.values) {
    for (double y : b.values) {
      if (x > y) {
        u += 1;
      } else if (x == y) {
        u += 0.5;
      }
    }
  }
  return u;
}

// Doubled midranks of the pooled sample, so ties stay integral.
std::vector<int> doubled_midranks(std::vector<double> pooled, std::vector<int>* tie_sizes) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return pooled[i] < pooled[j]; });
  std::vector<int> ranks(pooled.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // ranks i+1 .. j+1, doubled mean = i + j + 2
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = static_cast<int>(i + j + 2);
    if (tie_sizes) tie_sizes->push_back(static_cast<int>(j - i + 1));
    i = j + 1;
  }
  return ranks;
}

// Counts, for every doubled rank sum, the subsets of size n1 reaching it.
double exact_p(const std::vector<int>& ranks, std::size_t n1, double u_obs) {
  const int max_sum = std::accumulate(ranks.begin(), ranks.end(), 0);
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1;
  for (int r : ranks) {
    for (std::size_t k = n1; k >= 1; --k) {
      for (int s = max_sum; s >= r; --s) ways[k][static_cast<std::size_t>(s)] += ways[k - 1][static_cast<std::size_t>(s - r)];
    }
  }
  const double n2 = static_cast<double>(ranks.size() - n1);
  const double mu = static_cast<double>(n1) * n2 / 2;
  const double offset = static_cast<double>(n1 * (n1 + 1)) / 2;
  const double observed = std::abs(u_obs - mu);
  double hits = 0, total = 0;
  for (int s = 0; s <= max_sum; ++s) {
    const double w = ways[n1][static_cast<std::size_t>(s)];
    if (w == 0) continue;
    total += w;
    const double u = s / 2.0 - offset;
    if (std::abs(u - mu) >= observed - 1e-9) hits += w;
  }
  return hits / total;
}

}  // namespace

MannWhitneyResult mann_whitney_u(const SampleGroup& a, const SampleGroup& b) {
  require_values(a);
  require_values(b);
  MannWhitneyResult r;
  r.u = u_statistic(a, b);

  const double n1 = static_cast<double>(a.values.size());
  const double n2 = static_cast<double>(b.values.size());
  const double n = n1 + n2;
  std::vector<double> pooled = a.values;
  pooled.insert(pooled.end(), b.values.begin(), b.values.end());
  std::vector<int> ties;
  const auto ranks = doubled_midranks(pooled, &ties);

  double tie_term = 0;
  for (int t : ties) tie_term += static_cast<double>(t) * t * t - t;
  const double var = n1 * n2 / 12.0 * ((n + 1) - (n > 1 ? tie_term / (n * (n - 1)) : 0.0));
  const double mu = n1 * n2 / 2;
  if (var <= 0) {
    r.p_normal = 1;
  } else {
    const double z = std::max(0.0, std::abs(r.u - mu) - 0.5) / std::sqrt(var);
    r.p_normal = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  }

  if (a.values.size() <= kExactLimit && b.values.size() <= kExactLimit) {
    r.p_exact = exact_p(ranks, a.values.size(), r.u);
  }
  return r;
}

double a12(const SampleGroup& a, const SampleGroup& b) {
  require_values(a);
  require_values(b);
  return u_statistic(a, b) / (static_cast<double>(a.values.size()) * static_cast<double>(b.values.size()));
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_dev(std::span<const double> v) {
  if (v.size() < 2) return 0;
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

namespace {

GroupSummary summarise_group(std::string label, std::vector<double> values) {
  GroupSummary g;
  g.mean = mean(values);
  g.std = std_dev(values);
  g.group = {std::move(label), std::move(values)};
  return g;
}

Comparison compare_groups(const std::vector<double>& baseline, const std::vector<double>& adaptive,
                          const std::string& scope, std::vector<std::string>& warnings) {
  Comparison c;
  if (!baseline.empty()) c.baseline = summarise_group("baseline", baseline);
  if (!adaptive.empty()) c.adaptive = summarise_group("adaptive", adaptive);
  if (baseline.size() == 1 || adaptive.size() == 1) {
    warnings.push_back(fmt::format("{}: a single repetition, standard deviation reported as 0", scope));
  }
  if (c.baseline && c.adaptive) {
    c.mw = mann_whitney_u(c.baseline->group, c.adaptive->group);
    c.a12 = a12(c.baseline->group, c.adaptive->group);
  }
  return c;
}

std::vector<Verdict> verdicts_for(const RunLog& log, std::optional<Profile> profile) {
  std::vector<Verdict> out;
  for (const auto& e : log.entries) {
    if (!e.tested() || (profile && e.profile != *profile)) continue;
    out.push_back({e.tick, *e.expected, e.bsn, *e.pass, log.config.scenario, log.config.mode});
  }
  return out;
}

}  // namespace

StatReport summarize(const std::vector<RunLog>& logs) {
  StatReport report;
  using Key = std::tuple<Scenario, Mode, int>;
  std::map<Key, const RunLog*> by_key;
  std::set<Scenario> adaptive_set, baseline_set;
  for (const auto& log : logs) {
    const Key key{log.config.scenario, log.config.mode, log.config.repetition};
    if (!by_key.emplace(key, &log).second) {
      throw ValidationError(fmt::format("duplicate run log for {} {} repetition {}",
                                        scenario_name(log.config.scenario), mode_name(log.config.mode),
                                        log.config.repetition));
    }
    (log.config.mode == Mode::Adaptive ? adaptive_set : baseline_set).insert(log.config.scenario);
  }
  if (!adaptive_set.empty() && !baseline_set.empty() && adaptive_set != baseline_set) {
    throw ValidationError("adaptive and baseline run logs cover different scenarios");
  }
  std::set<Scenario> scenarios = adaptive_set;
  scenarios.insert(baseline_set.begin(), baseline_set.end());

  for (Scenario s : scenarios) {
    ScenarioReport sr;
    sr.scenario = s;
    std::map<Mode, std::vector<const RunLog*>> runs;
    std::set<Profile> profiles;
    for (const auto& [key, log] : by_key) {
      if (std::get<0>(key) != s) continue;
      runs[std::get<1>(key)].push_back(log);
      for (const auto& [p, d] : log->config.schedule.segments()) profiles.insert(p);
    }

    auto collect = [&](Mode m, std::optional<Profile> profile) {
      std::vector<double> values;
      for (const RunLog* log : runs[m]) {
        const auto v = verdicts_for(*log, profile);
        if (const auto rate = ptcr(v)) {
          values.push_back(*rate);
        } else if (!profile || std::any_of(log->entries.begin(), log->entries.end(),
                                           [&](const LogEntry& e) { return e.profile == *profile; })) {
          report.warnings.push_back(fmt::format("{} {} repetition {}{}: no test cases, PTCR N/A", scenario_name(s),
                                                mode_name(m), log->config.repetition,
                                                profile ? fmt::format(" profile {}", profile_name(*profile)) : ""));
        }
      }
      return values;
    };
    auto mean_cases = [&](Mode m, bool readings) {
      std::vector<double> v;
      for (const RunLog* log : runs[m]) {
        v.push_back(static_cast<double>(readings ? log->tested_readings() : log->tested_dsrs()));
      }
      return mean(v);
    };

    sr.overall = compare_groups(collect(Mode::Baseline, std::nullopt), collect(Mode::Adaptive, std::nullopt),
                                std::string(scenario_name(s)), report.warnings);
    for (Profile p : profiles) {
      sr.per_profile.emplace_back(
          p, compare_groups(collect(Mode::Baseline, p), collect(Mode::Adaptive, p),
                            fmt::format("{} {}", scenario_name(s), profile_name(p)), report.warnings));
    }
    sr.baseline_cases_dsr = mean_cases(Mode::Baseline, false);
    sr.baseline_cases_readings = mean_cases(Mode::Baseline, true);
    sr.adaptive_cases_dsr = mean_cases(Mode::Adaptive, false);
    sr.adaptive_cases_readings = mean_cases(Mode::Adaptive, true);
    report.scenarios.push_back(std::move(sr));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string fixed2(double v) { return fmt::format("{:.2f}", v); }
std::string sci(double v) { return fmt::format("{:.4e}", v); }

std::string joined(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += fixed2(values[i]);
  }
  return out;
}

void group_row(std::string& out, std::string_view prefix, std::string_view mode,
               const std::optional<GroupSummary>& g) {
  if (!g) {
    out += fmt::format("{},{},0,,,\n", prefix, mode);
    return;
  }
  out += fmt::format("{},{},{},{},{},{}\n", prefix, mode, g->group.values.size(), joined(g->group.values),
                     fixed2(g->mean), fixed2(g->std));
}

std::string stat_cells(const Comparison& c) {
  if (!c.mw) return ",,,";
  return fmt::format("{},{},{},{}", c.mw->u, c.mw->p_exact ? sci(*c.mw->p_exact) : "", sci(c.mw->p_normal),
                     fixed2(*c.a12));
}

}  // namespace

std::string render_table4_csv(const StatReport& report) {
  std::string out = "scenario,mode,runs,ptcr_per_run,mean,std,test_cases_dsr,test_cases_readings\n";
  for (const auto& s : report.scenarios) {
    const auto name = scenario_name(s.scenario);
    auto row = [&](std::string_view mode, const std::optional<GroupSummary>& g, double dsr, double readings) {
      std::string line;
      group_row(line, name, mode, g);
      line.pop_back();
      out += fmt::format("{},{},{}\n", line, fixed2(dsr), fixed2(readings));
    };
    row("baseline", s.overall.baseline, s.baseline_cases_dsr, s.baseline_cases_readings);
    row("adaptive", s.overall.adaptive, s.adaptive_cases_dsr, s.adaptive_cases_readings);
  }
  return out;
}

std::string render_table5_csv(const StatReport& report) {
  std::string out = "scenario,profile,mode,runs,ptcr_per_run,mean,std\n";
  for (const auto& s : report.scenarios) {
    for (const auto& [p, c] : s.per_profile) {
      const auto prefix = fmt::format("{},{}", scenario_name(s.scenario), profile_name(p));
      group_row(out, prefix, "baseline", c.baseline);
      group_row(out, prefix, "adaptive", c.adaptive);
    }
  }
  return out;
}

std::string render_stats_csv(const StatReport& report) {
  std::string out = "scenario,scope,U,p_exact,p_normal,A12\n";
  for (const auto& s : report.scenarios) {
    out += fmt::format("{},all,{}\n", scenario_name(s.scenario), stat_cells(s.overall));
    for (const auto& [p, c] : s.per_profile) {
      out += fmt::format("{},{},{}\n", scenario_name(s.scenario), profile_name(p), stat_cells(c));
    }
  }
  return out;
}

std::string render_summary(const StatReport& report) {
  std::string out = "Passing test case rate (PTCR, %), baseline vs adaptive\n\n";
  auto describe_group = [](const std::optional<GroupSummary>& g) -> std::string {
    if (!g) return "n/a";
    return fmt::format("{} +/- {} (n={})", fixed2(g->mean), fixed2(g->std), g->group.values.size());
  };
  for (const auto& s : report.scenarios) {
    out += fmt::format("Scenario {}\n", scenario_name(s.scenario));
    out += fmt::format("  baseline  {}  test cases/run {} DSRs, {} readings\n", describe_group(s.overall.baseline),
                       fixed2(s.baseline_cases_dsr), fixed2(s.baseline_cases_readings));
    out += fmt::format("  adaptive  {}  test cases/run {} DSRs, {} readings\n", describe_group(s.overall.adaptive),
                       fixed2(s.adaptive_cases_dsr), fixed2(s.adaptive_cases_readings));
    if (s.overall.mw) {
      out += fmt::format("  U = {}  p_exact = {}  p_normal = {}  A12 = {}\n", s.overall.mw->u,
                         s.overall.mw->p_exact ? sci(*s.overall.mw->p_exact) : "n/a", sci(s.overall.mw->p_normal),
                         fixed2(*s.overall.a12));
    }
    out += "  per profile (baseline / adaptive):\n";
    for (const auto& [p, c] : s.per_profile) {
      out += fmt::format("    {:<20} {} / {}\n", profile_name(p), c.baseline ? fixed2(c.baseline->mean) : "n/a",
                         c.adaptive ? fixed2(c.adaptive->mean) : "n/a");
    }
    out += '\n';
  }
  out +=
      "Note: statistics are computed per scenario (baseline repetitions against adaptive\n"
      "repetitions). A single p value pooled across scenarios is not reported because the\n"
      "pooling method is ambiguous; per-scenario 5 vs 5 comparisons are the comparable unit.\n";
  if (!report.warnings.empty()) {
    out += "\nWarnings:\n";
    for (const auto& w : report.warnings) out += fmt::format("  - {}\n", w);
  }
  return out;
}

}  // namespace adapta
