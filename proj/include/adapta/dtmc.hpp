#pragma once

// Patient simulation: per-sensor discrete-time Markov chains over risk bands,
// one DSR emitted per simulated second.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adapta/core_model.hpp"
#include "adapta/rng.hpp"

namespace adapta {

inline constexpr double kStochasticTolerance = 1e-9;

/// A chain whose states are the risk bands of one sensor, in ascending
/// value order. `p` is row-major, states x states.
struct Dtmc {
  std::vector<Band> states;
  std::vector<double> p;
  std::size_t current = 0;

  std::size_t size() const { return states.size(); }
  double prob(std::size_t from, std::size_t to) const { return p[from * size() + to]; }
  std::span<const double> row(std::size_t from) const {
    return {p.data() + from * size(), size()};
  }

  friend bool operator==(const Dtmc&, const Dtmc&) = default;
};

/// Human-readable descriptions of every broken invariant; empty means valid.
std::vector<std::string> validate_dtmc(const Dtmc& d);

/// Samples the next state by inverse CDF over the fixed state order and
/// moves the chain there.
std::size_t step(Dtmc& d, Rng& rng);

/// Uniform draw in [lo, hi). Throws DomainError when lo >= hi.
double sample_value(double lo, double hi, Rng& rng);

struct ProfileModel {
  Profile profile = Profile::Youth;
  std::array<Dtmc, kSensorCount> chains{};
  RiskRangeTable ranges = RiskRangeTable::standard();

  const Dtmc& chain(SensorKind s) const { return chains[index_of(s)]; }
  friend bool operator==(const ProfileModel&, const ProfileModel&) = default;
};

/// Throws ValidationError unless every chain is stochastic and its states
/// are exactly the sensor's bands in `ranges`.
void validate_model(const ProfileModel& m);

using ModelCatalog = std::map<Profile, ProfileModel>;

/// Builds a catalog keyed by profile, validating each model. Throws
/// ValidationError on duplicates.
ModelCatalog make_catalog(std::vector<ProfileModel> models);

/// Ordered (profile, duration in simulated seconds) segments.
class ProfileSchedule {
 public:
  using Segment = std::pair<Profile, std::int64_t>;

  ProfileSchedule() = default;
  /// Throws ConfigError on an empty schedule or non-positive duration.
  explicit ProfileSchedule(std::vector<Segment> segments);

  /// Every profile in `profiles`, each for `duration` seconds.
  static ProfileSchedule uniform(std::span<const Profile> profiles, std::int64_t duration);

  const std::vector<Segment>& segments() const { return segments_; }
  std::int64_t total_ticks() const;

 private:
  std::vector<Segment> segments_;
};

/// Simulates one patient by running the active profile's chains.
///
/// The local clock counts ticks within the current profile segment and is
/// bounded by the segment duration; DSR ticks count from the start of the
/// run and never reset.
class PatientSim {
 public:
  PatientSim(std::shared_ptr<const ModelCatalog> catalog, Profile initial, std::uint64_t seed,
             std::int64_t duration);

  /// The next DSR, or nullopt once the segment duration is exhausted.
  std::optional<Dsr> next_dsr();

  /// Swaps the active model and restarts every chain at its Low state,
  /// even when `p` is already active. Starts a new segment of `duration`
  /// ticks (the previous duration when omitted).
  void set_profile(Profile p, std::optional<std::int64_t> duration = std::nullopt);

  Profile profile() const { return profile_; }
  std::int64_t clock() const { return clock_; }
  std::int64_t duration() const { return duration_; }
  std::int64_t run_tick() const { return run_tick_; }
  const Dtmc& chain(SensorKind s) const { return chains_[index_of(s)]; }

 private:
  void reset_chains();

  std::shared_ptr<const ModelCatalog> catalog_;
  const ProfileModel* model_ = nullptr;
  Profile profile_;
  std::array<Dtmc, kSensorCount> chains_{};
  Rng rng_;
  std::int64_t duration_;
  std::int64_t clock_ = 0;
  std::int64_t run_tick_ = 0;
};

}  // namespace adapta
