#pragma once

#include <cstdint>
#include <vector>

#include "truckpark/scenario.hpp"
#include "truckpark/sim_engine.hpp"

namespace truckpark {

/// Source log plus one app-participation flag per event (same order).
struct FlaggedEventLog {
    EventLog log;
    std::vector<bool> app_user;
    bool operator==(const FlaggedEventLog&) const = default;
};

/// Occupancy as seen through the app. `scaled_ratio` is empty until
/// `scale_series` fills it.
struct ObservedSeries {
    std::int64_t start_s = 0;
    std::int64_t step_s = 60;
    std::vector<std::int32_t> observed_count;
    std::vector<double> scaled_ratio;

    std::size_t size() const { return observed_count.size(); }
    std::int64_t time_at(std::size_t i) const { return start_s + static_cast<std::int64_t>(i) * step_s; }
    bool operator==(const ObservedSeries&) const = default;
};

/// Flags each truck independently: truck i is an app user iff its uniform
/// draw u_i < p. With a fixed seed the flag sets are nested in p.
FlaggedEventLog assign_app_users(const EventLog& events, PenetrationRate p, std::uint64_t rng_seed);

/// Interval counting over the flagged events only, same half-open semantics
/// as occupancy_from_events.
ObservedSeries observed_count_series(const FlaggedEventLog& flagged, std::int64_t start_s, std::int64_t step_s,
                                     std::size_t points);

/// scaled_ratio = observed_count / (p * green_capacity).
ObservedSeries scale_series(ObservedSeries observed, PenetrationRate p, std::int64_t green_capacity);

/// A ground-truth series expressed as a fully observed (p = 1) stream.
ObservedSeries as_observed(const OccupancySeries& truth);

} // namespace truckpark
