#include "truckpark/observation.hpp"

#include "truckpark/error.hpp"
#include "truckpark/rng.hpp"

namespace truckpark {

FlaggedEventLog assign_app_users(const EventLog& events, PenetrationRate p, std::uint64_t rng_seed) {
    FlaggedEventLog out;
    out.log = events;
    out.app_user.reserve(events.events.size());
    Rng rng(rng_seed);
    for (std::size_t i = 0; i < events.events.size(); ++i) {
        out.app_user.push_back(rng.uniform() < p.value());
    }
    return out;
}

ObservedSeries observed_count_series(const FlaggedEventLog& flagged, std::int64_t start_s, std::int64_t step_s,
                                     std::size_t points) {
    if (flagged.app_user.size() != flagged.log.events.size()) {
        throw InvariantError("flag vector length does not match the event log");
    }
    std::vector<ParkingEvent> users;
    for (std::size_t i = 0; i < flagged.log.events.size(); ++i) {
        if (flagged.app_user[i]) users.push_back(flagged.log.events[i]);
    }
    // Zone capacities do not matter for the total count.
    const OccupancySeries counts = occupancy_from_events(users, start_s, step_s, points, ZoneCapacities{1, 0, 0});
    ObservedSeries out;
    out.start_s = start_s;
    out.step_s = step_s;
    out.observed_count = counts.count_total;
    return out;
}

ObservedSeries scale_series(ObservedSeries observed, PenetrationRate p, std::int64_t green_capacity) {
    if (green_capacity < 1) throw InvariantError("green capacity must be >= 1");
    const double denom = p.value() * static_cast<double>(green_capacity);
    observed.scaled_ratio.resize(observed.observed_count.size());
    for (std::size_t i = 0; i < observed.observed_count.size(); ++i) {
        observed.scaled_ratio[i] = static_cast<double>(observed.observed_count[i]) / denom;
    }
    return observed;
}

ObservedSeries as_observed(const OccupancySeries& truth) {
    ObservedSeries out;
    out.start_s = truth.start_s;
    out.step_s = truth.step_s;
    out.observed_count = truth.count_total;
    return scale_series(std::move(out), PenetrationRate(1.0), truth.green_capacity);
}

} // namespace truckpark
