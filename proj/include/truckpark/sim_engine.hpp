#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "truckpark/scenario.hpp"

namespace truckpark {

/// One truck's stay on the lot over the half-open interval [arrival_s, departure_s).
struct ParkingEvent {
    std::int64_t truck_id = 0;
    std::int64_t arrival_s = 0;
    std::int64_t departure_s = 0;
    ZoneId zone = ZoneId::Green;
    bool operator==(const ParkingEvent&) const = default;
};

struct EventLog {
    std::vector<ParkingEvent> events; // sorted by (arrival_s, truck_id)
    std::string scenario_fingerprint;
    bool operator==(const EventLog&) const = default;
};

/// Regular-grid parked-truck counts. Grid point i sits at start_s + i * step_s.
struct OccupancySeries {
    std::int64_t start_s = 0;
    std::int64_t step_s = 60;
    std::int64_t green_capacity = 1;
    std::vector<std::int32_t> count_green;
    std::vector<std::int32_t> count_yellow;
    std::vector<std::int32_t> count_red;
    std::vector<std::int32_t> count_total;

    std::size_t size() const { return count_total.size(); }
    std::int64_t time_at(std::size_t i) const { return start_s + static_cast<std::int64_t>(i) * step_s; }
    /// count_total / green capacity; exceeds 1 under overflow.
    double ratio(std::size_t i) const {
        return static_cast<double>(count_total[i]) / static_cast<double>(green_capacity);
    }
    bool operator==(const OccupancySeries&) const = default;
};

struct SimulationResult {
    EventLog log;
    OccupancySeries occupancy;
    std::int64_t rejected = 0; // arrivals that found every zone full
    std::int64_t arrivals = 0; // accepted + rejected
};

/// Poisson thinning against the peak rate. Times are floored to whole
/// seconds, so the result is non-decreasing (equal seconds are possible).
std::vector<std::int64_t> sample_arrivals(const ArrivalProfile& profile, std::int64_t horizon_days,
                                          std::uint64_t rng_seed);

class Rng;

/// Mixture draw in whole seconds, redrawn below the minimum (at most 1000
/// times, then the minimum is returned).
std::int64_t sample_duration(const DurationMixture& mixture, Rng& rng);

SimulationResult simulate(const ValidatedScenario& scenario);

/// Count at grid point t = number of events with arrival_s <= t < departure_s.
/// Throws InvariantError if `events` is not sorted by arrival.
OccupancySeries occupancy_from_events(std::span<const ParkingEvent> events, std::int64_t start_s,
                                      std::int64_t step_s, std::size_t points, const ZoneCapacities& capacities);

/// Grid over [0, horizon) with the scenario's grid step.
OccupancySeries occupancy_from_events(const EventLog& log, const ValidatedScenario& scenario);

/// Replays the log and throws InvariantError naming the first timestamp and
/// zone at which a capacity is exceeded.
void check_capacity(std::span<const ParkingEvent> events, const ZoneCapacities& capacities);

/// Structural checks: departure > arrival, arrival >= 0, sorted by
/// (arrival_s, truck_id), ids unique. With `require_dense` the ids must be
/// exactly 0..n-1 in order.
void check_event_log(std::span<const ParkingEvent> events, bool require_dense);

} // namespace truckpark
