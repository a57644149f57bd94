#include "adapta/dtmc.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "adapta/errors.hpp"

namespace adapta {

std::vector<std::string> validate_dtmc(const Dtmc& d) {
  std::vector<std::string> violations;
  const std::size_t n = d.size();
  if (n == 0) {
    violations.emplace_back("chain has no states");
    return violations;
  }
  if (d.p.size() != n * n) {
    violations.push_back(fmt::format("matrix has {} entries, expected {}", d.p.size(), n * n));
    return violations;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d.prob(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        violations.push_back(fmt::format("entry ({}, {}) = {} outside [0, 1]", i, j, v));
      }
      sum += v;
    }
    if (!(std::abs(sum - 1.0) <= kStochasticTolerance)) {
      violations.push_back(fmt::format("row {} sums to {}", i, sum));
    }
  }
  if (d.current >= n) {
    violations.push_back(fmt::format("current state {} out of range", d.current));
  }
  return violations;
}

std::size_t step(Dtmc& d, Rng& rng) {
  const auto row = d.row(d.current);
  const double u = rng.uniform01();
  double cumulative = 0;
  std::size_t last_positive = d.current;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] <= 0) continue;
    cumulative += row[j];
    last_positive = j;
    if (u < cumulative) {
      d.current = j;
      return j;
    }
  }
  // Rounding left the cumulative sum just below u.
  d.current = last_positive;
  return last_positive;
}

double sample_value(double lo, double hi, Rng& rng) {
  if (!(lo < hi)) {
    throw DomainError(fmt::format("empty sampling interval [{}, {})", lo, hi));
  }
  const double v = lo + (hi - lo) * rng.uniform01();
  return v < hi ? v : std::nextafter(hi, lo);
}

void validate_model(const ProfileModel& m) {
  for (auto s : kAllSensors) {
    const Dtmc& c = m.chain(s);
    if (c.states != m.ranges.bands(s)) {
      throw ValidationError(fmt::format("{}/{}: chain states differ from the risk bands",
                                        profile_name(m.profile), sensor_name(s)));
    }
    if (auto v = validate_dtmc(c); !v.empty()) {
      throw ValidationError(
          fmt::format("{}/{}: {}", profile_name(m.profile), sensor_name(s), v.front()));
    }
  }
}

ModelCatalog make_catalog(std::vector<ProfileModel> models) {
  ModelCatalog catalog;
  for (auto& m : models) {
    validate_model(m);
    const Profile p = m.profile;
    if (!catalog.emplace(p, std::move(m)).second) {
      throw ValidationError(fmt::format("duplicate model for profile {}", profile_name(p)));
    }
  }
  return catalog;
}

ProfileSchedule::ProfileSchedule(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ConfigError("profile schedule is empty");
  for (const auto& [p, d] : segments_) {
    if (d <= 0) {
      throw ConfigError(fmt::format("profile {} has non-positive duration {}", profile_name(p), d));
    }
  }
}

ProfileSchedule ProfileSchedule::uniform(std::span<const Profile> profiles, std::int64_t duration) {
  std::vector<Segment> segments;
  segments.reserve(profiles.size());
  for (auto p : profiles) segments.emplace_back(p, duration);
  return ProfileSchedule(std::move(segments));
}

std::int64_t ProfileSchedule::total_ticks() const {
  return std::accumulate(segments_.begin(), segments_.end(), std::int64_t{0},
                         [](std::int64_t acc, const Segment& s) { return acc + s.second; });
}

PatientSim::PatientSim(std::shared_ptr<const ModelCatalog> catalog, Profile initial,
                       std::uint64_t seed, std::int64_t duration)
    : catalog_(std::move(catalog)), profile_(initial), rng_(seed), duration_(duration) {
  if (!catalog_) throw UsageError("patient simulation needs a model catalog");
  if (duration_ <= 0) throw ConfigError("simulation duration must be positive");
  set_profile(initial, duration);
}

void PatientSim::set_profile(Profile p, std::optional<std::int64_t> duration) {
  const auto it = catalog_->find(p);
  if (it == catalog_->end()) {
    throw ConfigError(fmt::format("no model for profile {}", profile_name(p)));
  }
  if (duration) {
    if (*duration <= 0) throw ConfigError("segment duration must be positive");
    duration_ = *duration;
  }
  model_ = &it->second;
  profile_ = p;
  clock_ = 0;
  reset_chains();
}

void PatientSim::reset_chains() {
  for (auto s : kAllSensors) {
    auto& c = chains_[index_of(s)];
    c = model_->chain(s);
    c.current = model_->ranges.low_band_index(s);
  }
}

std::optional<Dsr> PatientSim::next_dsr() {
  if (clock_ >= duration_) return std::nullopt;
  Dsr dsr;
  dsr.tick = run_tick_;
  dsr.profile = profile_;
  for (auto s : kAllSensors) {
    auto& chain = chains_[index_of(s)];
    const std::size_t state = step(chain, rng_);
    const Band& band = chain.states[state];
    // A draw landing on a boundary owned by the neighbouring band is redrawn,
    // so every reading classifies to the chain's state.
    double v = sample_value(band.lo, band.hi, rng_);
    while (model_->ranges.band_index(s, v) != state) v = sample_value(band.lo, band.hi, rng_);
    dsr.at(s).value = v;
  }
  ++clock_;
  ++run_tick_;
  return dsr;
}

}  // namespace adapta
