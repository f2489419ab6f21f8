#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace truckpark {

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerHour = 3600;

/// Parking zones. Declaration order is the overflow priority.
enum class ZoneId : std::uint8_t { Green = 0, Yellow = 1, Red = 2 };

inline constexpr std::array<ZoneId, 3> kAllZones{ZoneId::Green, ZoneId::Yellow, ZoneId::Red};

const char* zone_name(ZoneId zone);

struct ZoneCapacities {
    std::int64_t green = 0;
    std::int64_t yellow = 0;
    std::int64_t red = 0;

    std::int64_t of(ZoneId zone) const;
    std::int64_t total() const { return green + yellow + red; }
    bool operator==(const ZoneCapacities&) const = default;
};

/// Non-homogeneous Poisson demand: piecewise-constant hourly rates
/// (trucks/hour) times a weekday factor. Day 0 of a scenario is weekday 0.
struct ArrivalProfile {
    std::array<double, 24> hourly_rates{};
    std::array<double, 7> weekday_multipliers{1, 1, 1, 1, 1, 1, 1};

    /// Rate in trucks per hour at `t_s` seconds since scenario start.
    double rate_at(std::int64_t t_s) const;
    bool operator==(const ArrivalProfile&) const = default;
};

struct DurationComponent {
    double weight = 0;
    double mean_minutes = 0;
    double stddev_minutes = 0;
    bool operator==(const DurationComponent&) const = default;
};

/// Parking-duration model: a Gaussian mixture of short breaks and long
/// rests, truncated below at `min_duration_minutes`.
struct DurationMixture {
    std::vector<DurationComponent> components;
    double min_duration_minutes = 5.0;
    bool operator==(const DurationMixture&) const = default;
};

struct ScenarioConfig {
    ZoneCapacities capacities;
    ArrivalProfile arrivals;
    DurationMixture durations;
    std::int64_t horizon_days = 22;
    std::uint64_t master_seed = 0;
    std::int64_t grid_step_s = 60;
    std::int64_t eval_step_s = 300;
    bool operator==(const ScenarioConfig&) const = default;
};

/// Immutable, checked scenario. Only `validate_config` creates one.
class ValidatedScenario {
public:
    const ScenarioConfig& config() const { return config_; }
    const ZoneCapacities& capacities() const { return config_.capacities; }
    std::int64_t horizon_s() const { return config_.horizon_days * kSecondsPerDay; }
    std::int64_t ticks_per_day() const { return kSecondsPerDay / config_.eval_step_s; }

    /// Hex SHA-256 of the canonical JSON form.
    const std::string& fingerprint() const { return fingerprint_; }

    /// Same scenario with a different master seed.
    ValidatedScenario with_seed(std::uint64_t seed) const;

    bool operator==(const ValidatedScenario& other) const { return config_ == other.config_; }

private:
    friend ValidatedScenario validate_config(const ScenarioConfig& raw);
    explicit ValidatedScenario(ScenarioConfig config);

    ScenarioConfig config_;
    std::string fingerprint_;
};

/// Checks every invariant and returns the first violation as a ConfigError
/// whose message starts with the field path.
ValidatedScenario validate_config(const ScenarioConfig& raw);

/// App penetration rate in (0, 1].
class PenetrationRate {
public:
    explicit PenetrationRate(double p);
    double value() const { return p_; }
    bool operator==(const PenetrationRate&) const = default;

private:
    double p_;
};

/// Named random sub-streams derived from the master seed.
enum class Stream : std::uint64_t { Arrivals = 0, Durations = 1, ZoneTieBreaks = 2, AppUsers = 3 };

/// master_seed XOR (stream_id * 0x9E3779B97F4A7C15), wrapping.
constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t stream_id) {
    return master_seed ^ (stream_id * 0x9E3779B97F4A7C15ULL);
}

constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed, Stream stream) {
    return derive_stream_seed(master_seed, static_cast<std::uint64_t>(stream));
}

// JSON mapping. Parsing rejects unknown keys and fills defaults for the
// optional fields (horizon_days, grid_step_s, eval_step_s,
// weekday_multipliers, min_duration_minutes).
nlohmann::json config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const nlohmann::json& doc);
ScenarioConfig load_config(const std::string& path);

/// Default scenario as shipped in configs/default_scenario.json.
ScenarioConfig default_config();

} // namespace truckpark
