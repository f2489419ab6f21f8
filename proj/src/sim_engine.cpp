#include "truckpark/sim_engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <queue>

#include "truckpark/error.hpp"
#include "truckpark/rng.hpp"

namespace truckpark {

std::vector<std::int64_t> sample_arrivals(const ArrivalProfile& profile, std::int64_t horizon_days,
                                          std::uint64_t rng_seed) {
    std::vector<std::int64_t> out;
    const double peak_rate = *std::max_element(profile.hourly_rates.begin(), profile.hourly_rates.end()) *
                             *std::max_element(profile.weekday_multipliers.begin(), profile.weekday_multipliers.end());
    if (!(peak_rate > 0) || horizon_days <= 0) return out;

    Rng rng(rng_seed);
    const double horizon = static_cast<double>(horizon_days * kSecondsPerDay);
    const double peak_per_s = peak_rate / static_cast<double>(kSecondsPerHour);
    double t = 0;
    while (true) {
        t += rng.exponential(peak_per_s);
        if (t >= horizon) break;
        const auto second = static_cast<std::int64_t>(t);
        const double accept = rng.uniform();
        if (accept * peak_rate < profile.rate_at(second)) out.push_back(second);
    }
    return out;
}

std::int64_t sample_duration(const DurationMixture& mixture, Rng& rng) {
    constexpr int kMaxResamples = 1000;
    const double min_s = mixture.min_duration_minutes * 60.0;
    const auto min_whole = static_cast<std::int64_t>(std::ceil(min_s));

    const double pick = rng.uniform();
    std::size_t idx = 0;
    double acc = 0;
    for (; idx + 1 < mixture.components.size(); ++idx) {
        acc += mixture.components[idx].weight;
        if (pick < acc) break;
    }
    const auto& comp = mixture.components[idx];
    for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
        const double d = rng.normal(comp.mean_minutes, comp.stddev_minutes) * 60.0;
        if (d >= min_s) return std::max(std::llround(d), static_cast<long long>(min_whole));
    }
    return min_whole;
}

SimulationResult simulate(const ValidatedScenario& scenario) {
    const auto& cfg = scenario.config();
    const std::vector<std::int64_t> arrivals =
        sample_arrivals(cfg.arrivals, cfg.horizon_days, derive_stream_seed(cfg.master_seed, Stream::Arrivals));
    Rng duration_rng(derive_stream_seed(cfg.master_seed, Stream::Durations));

    using MinHeap = std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>>;
    std::array<MinHeap, 3> parked;

    SimulationResult result;
    result.arrivals = static_cast<std::int64_t>(arrivals.size());
    result.log.scenario_fingerprint = scenario.fingerprint();
    result.log.events.reserve(arrivals.size());

    for (const std::int64_t a : arrivals) {
        const std::int64_t duration = sample_duration(cfg.durations, duration_rng);
        for (auto& heap : parked) {
            while (!heap.empty() && heap.top() <= a) heap.pop();
        }
        bool placed = false;
        for (const ZoneId zone : kAllZones) {
            auto& heap = parked[static_cast<std::size_t>(zone)];
            if (static_cast<std::int64_t>(heap.size()) < scenario.capacities().of(zone)) {
                heap.push(a + duration);
                result.log.events.push_back(
                    {static_cast<std::int64_t>(result.log.events.size()), a, a + duration, zone});
                placed = true;
                break;
            }
        }
        if (!placed) ++result.rejected;
    }
    result.occupancy = occupancy_from_events(result.log, scenario);
    return result;
}

OccupancySeries occupancy_from_events(std::span<const ParkingEvent> events, std::int64_t start_s,
                                      std::int64_t step_s, std::size_t points, const ZoneCapacities& capacities) {
    if (step_s <= 0) throw InvariantError("occupancy grid step must be > 0");
    OccupancySeries s;
    s.start_s = start_s;
    s.step_s = step_s;
    s.green_capacity = capacities.green;

    // Difference arrays: an interval [a, d) covers grid points ceil((a - start) / step) ..
    // ceil((d - start) / step) - 1.
    std::array<std::vector<std::int32_t>, 3> delta;
    for (auto& d : delta) d.assign(points + 1, 0);
    const auto first_index_at_or_after = [&](std::int64_t t) -> std::int64_t {
        const std::int64_t off = t - start_s;
        if (off <= 0) return 0;
        return (off + step_s - 1) / step_s;
    };
    const auto n = static_cast<std::int64_t>(points);
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (i > 0 && e.arrival_s < events[i - 1].arrival_s) {
            throw InvariantError("events are not sorted by arrival (truck_id " + std::to_string(e.truck_id) + ")");
        }
        const std::int64_t lo = std::min(first_index_at_or_after(e.arrival_s), n);
        const std::int64_t hi = std::min(first_index_at_or_after(e.departure_s), n);
        if (lo >= hi) continue;
        auto& d = delta[static_cast<std::size_t>(e.zone)];
        d[static_cast<std::size_t>(lo)] += 1;
        d[static_cast<std::size_t>(hi)] -= 1;
    }
    s.count_green.resize(points);
    s.count_yellow.resize(points);
    s.count_red.resize(points);
    s.count_total.resize(points);
    std::array<std::int32_t, 3> run{0, 0, 0};
    for (std::size_t i = 0; i < points; ++i) {
        for (std::size_t z = 0; z < 3; ++z) run[z] += delta[z][i];
        s.count_green[i] = run[0];
        s.count_yellow[i] = run[1];
        s.count_red[i] = run[2];
        s.count_total[i] = run[0] + run[1] + run[2];
    }
    return s;
}

OccupancySeries occupancy_from_events(const EventLog& log, const ValidatedScenario& scenario) {
    const auto step = scenario.config().grid_step_s;
    return occupancy_from_events(log.events, 0, step, static_cast<std::size_t>(scenario.horizon_s() / step),
                                 scenario.capacities());
}

void check_capacity(std::span<const ParkingEvent> events, const ZoneCapacities& capacities) {
    // Sweep over (time, +/-1, zone) with departures ordered before arrivals
    // at the same second, matching the half-open intervals.
    struct Change {
        std::int64_t t;
        int delta;
        ZoneId zone;
    };
    std::vector<Change> changes;
    changes.reserve(2 * events.size());
    for (const auto& e : events) {
        changes.push_back({e.arrival_s, +1, e.zone});
        changes.push_back({e.departure_s, -1, e.zone});
    }
    std::stable_sort(changes.begin(), changes.end(), [](const Change& a, const Change& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.delta < b.delta;
    });
    std::array<std::int64_t, 3> count{0, 0, 0};
    for (const auto& c : changes) {
        auto& n = count[static_cast<std::size_t>(c.zone)];
        n += c.delta;
        if (n > capacities.of(c.zone)) {
            throw InvariantError("capacity exceeded at t=" + std::to_string(c.t) + " s in zone " +
                                 zone_name(c.zone) + " (" + std::to_string(n) + " > " +
                                 std::to_string(capacities.of(c.zone)) + ")");
        }
    }
}

void check_event_log(std::span<const ParkingEvent> events, bool require_dense) {
    std::vector<std::int64_t> ids;
    ids.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        const std::string who = "truck_id " + std::to_string(e.truck_id);
        if (e.arrival_s < 0) throw InvariantError(who + ": arrival_s must be >= 0");
        if (e.departure_s <= e.arrival_s) throw InvariantError(who + ": departure_s must be > arrival_s");
        if (i > 0) {
            const auto& p = events[i - 1];
            if (e.arrival_s < p.arrival_s || (e.arrival_s == p.arrival_s && e.truck_id < p.truck_id)) {
                throw InvariantError(who + ": events not sorted by (arrival_s, truck_id)");
            }
        }
        if (require_dense && e.truck_id != static_cast<std::int64_t>(i)) {
            throw InvariantError(who + ": truck ids must be 0..n-1 in arrival order");
        }
        ids.push_back(e.truck_id);
    }
    if (!require_dense) {
        std::sort(ids.begin(), ids.end());
        const auto dup = std::adjacent_find(ids.begin(), ids.end());
        if (dup != ids.end()) throw InvariantError("duplicate truck_id " + std::to_string(*dup));
    }
}

} // namespace truckpark
