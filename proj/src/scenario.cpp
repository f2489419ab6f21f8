#include "truckpark/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "truckpark/digest.hpp"
#include "truckpark/error.hpp"

namespace truckpark {

using nlohmann::json;

const char* zone_name(ZoneId zone) {
    switch (zone) {
    case ZoneId::Green: return "green";
    case ZoneId::Yellow: return "yellow";
    case ZoneId::Red: return "red";
    }
    return "?";
}

std::int64_t ZoneCapacities::of(ZoneId zone) const {
    switch (zone) {
    case ZoneId::Green: return green;
    case ZoneId::Yellow: return yellow;
    case ZoneId::Red: return red;
    }
    return 0;
}

double ArrivalProfile::rate_at(std::int64_t t_s) const {
    const std::int64_t day = t_s / kSecondsPerDay;
    const std::int64_t hour = (t_s % kSecondsPerDay) / kSecondsPerHour;
    return hourly_rates[static_cast<std::size_t>(hour)] *
           weekday_multipliers[static_cast<std::size_t>(day % 7)];
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + " " + what);
}

std::string indexed(const std::string& base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

void check_finite_nonneg(double v, const std::string& path) {
    if (!std::isfinite(v)) fail(path, "must be finite");
    if (v < 0) fail(path, "must be >= 0");
}

} // namespace

ValidatedScenario::ValidatedScenario(ScenarioConfig config)
    : config_(std::move(config)), fingerprint_(sha256_hex(config_to_json(config_).dump())) {}

ValidatedScenario ValidatedScenario::with_seed(std::uint64_t seed) const {
    ScenarioConfig copy = config_;
    copy.master_seed = seed;
    return validate_config(copy);
}

ValidatedScenario validate_config(const ScenarioConfig& raw) {
    const auto& cap = raw.capacities;
    if (cap.green < 1) fail("capacities.green", "must be >= 1");
    if (cap.yellow < 0) fail("capacities.yellow", "must be >= 0");
    if (cap.red < 0) fail("capacities.red", "must be >= 0");

    bool any_rate = false;
    for (std::size_t h = 0; h < raw.arrivals.hourly_rates.size(); ++h) {
        const double r = raw.arrivals.hourly_rates[h];
        check_finite_nonneg(r, indexed("arrivals.hourly_rates", h));
        any_rate = any_rate || r > 0;
    }
    if (!any_rate) fail("arrivals.hourly_rates", "must contain at least one rate > 0");
    for (std::size_t d = 0; d < raw.arrivals.weekday_multipliers.size(); ++d) {
        check_finite_nonneg(raw.arrivals.weekday_multipliers[d], indexed("arrivals.weekday_multipliers", d));
    }

    const auto& comps = raw.durations.components;
    if (comps.empty()) fail("durations.components", "must not be empty");
    double weight_sum = 0;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string base = indexed("durations.components", i);
        const auto& c = comps[i];
        if (!std::isfinite(c.weight) || c.weight <= 0) fail(base + ".weight", "must be > 0");
        if (!std::isfinite(c.mean_minutes) || c.mean_minutes <= 0) fail(base + ".mean_minutes", "must be > 0");
        if (!std::isfinite(c.stddev_minutes) || c.stddev_minutes <= 0) fail(base + ".stddev_minutes", "must be > 0");
        weight_sum += c.weight;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9) fail("durations.components", "weights must sum to 1");
    if (!std::isfinite(raw.durations.min_duration_minutes) || raw.durations.min_duration_minutes <= 0) {
        fail("durations.min_duration_minutes", "must be > 0");
    }

    if (raw.horizon_days < 1) fail("horizon_days", "must be >= 1");
    if (raw.grid_step_s < 1) fail("grid_step_s", "must be >= 1");
    if (raw.eval_step_s < 1 || raw.eval_step_s % raw.grid_step_s != 0) {
        fail("eval_step_s", "must be a positive multiple of grid_step_s");
    }
    if (kSecondsPerDay % raw.eval_step_s != 0) fail("eval_step_s", "must divide 86400");
    return ValidatedScenario(raw);
}

PenetrationRate::PenetrationRate(double p) : p_(p) {
    if (!(p > 0.0 && p <= 1.0)) throw ConfigError("penetration p must be in (0,1]");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "must be an object");
    std::set<std::string> names(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!names.contains(item.key())) {
            fail(path.empty() ? item.key() : path + "." + item.key(), "is not a known key");
        }
    }
}

const json& required(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, "is required");
    return *it;
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "must be a number");
    return v.get<double>();
}

std::int64_t get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "must be an integer");
    return v.get<std::int64_t>();
}

template <std::size_t N>
std::array<double, N> get_array(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != N) fail(path, "must be an array of " + std::to_string(N) + " numbers");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = get_number(v[i], indexed(path, i));
    return out;
}

} // namespace

json config_to_json(const ScenarioConfig& c) {
    json comps = json::array();
    for (const auto& comp : c.durations.components) {
        comps.push_back({{"weight", comp.weight},
                         {"mean_minutes", comp.mean_minutes},
                         {"stddev_minutes", comp.stddev_minutes}});
    }
    return {
        {"capacities", {{"green", c.capacities.green}, {"yellow", c.capacities.yellow}, {"red", c.capacities.red}}},
        {"arrivals", {{"hourly_rates", c.arrivals.hourly_rates}, {"weekday_multipliers", c.arrivals.weekday_multipliers}}},
        {"durations", {{"components", comps}, {"min_duration_minutes", c.durations.min_duration_minutes}}},
        {"horizon_days", c.horizon_days},
        {"master_seed", c.master_seed},
        {"grid_step_s", c.grid_step_s},
        {"eval_step_s", c.eval_step_s},
    };
}

ScenarioConfig config_from_json(const json& doc) {
    reject_unknown(doc, "", {"capacities", "arrivals", "durations", "horizon_days", "master_seed",
                             "grid_step_s", "eval_step_s"});
    ScenarioConfig c;

    const json& cap = required(doc, "capacities", "capacities");
    reject_unknown(cap, "capacities", {"green", "yellow", "red"});
    c.capacities.green = get_int(required(cap, "green", "capacities.green"), "capacities.green");
    c.capacities.yellow = cap.contains("yellow") ? get_int(cap["yellow"], "capacities.yellow") : 0;
    c.capacities.red = cap.contains("red") ? get_int(cap["red"], "capacities.red") : 0;

    const json& arr = required(doc, "arrivals", "arrivals");
    reject_unknown(arr, "arrivals", {"hourly_rates", "weekday_multipliers"});
    c.arrivals.hourly_rates = get_array<24>(required(arr, "hourly_rates", "arrivals.hourly_rates"), "arrivals.hourly_rates");
    if (arr.contains("weekday_multipliers")) {
        c.arrivals.weekday_multipliers = get_array<7>(arr["weekday_multipliers"], "arrivals.weekday_multipliers");
    }

    const json& dur = required(doc, "durations", "durations");
    reject_unknown(dur, "durations", {"components", "min_duration_minutes"});
    const json& comps = required(dur, "components", "durations.components");
    if (!comps.is_array()) fail("durations.components", "must be an array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string base = indexed("durations.components", i);
        reject_unknown(comps[i], base, {"weight", "mean_minutes", "stddev_minutes"});
        DurationComponent comp;
        comp.weight = get_number(required(comps[i], "weight", base + ".weight"), base + ".weight");
        comp.mean_minutes = get_number(required(comps[i], "mean_minutes", base + ".mean_minutes"), base + ".mean_minutes");
        comp.stddev_minutes =
            get_number(required(comps[i], "stddev_minutes", base + ".stddev_minutes"), base + ".stddev_minutes");
        c.durations.components.push_back(comp);
    }
    if (dur.contains("min_duration_minutes")) {
        c.durations.min_duration_minutes = get_number(dur["min_duration_minutes"], "durations.min_duration_minutes");
    }

    if (doc.contains("horizon_days")) c.horizon_days = get_int(doc["horizon_days"], "horizon_days");
    const json& seed = required(doc, "master_seed", "master_seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
        fail("master_seed", "must be a non-negative 64-bit integer");
    }
    c.master_seed = seed.get<std::uint64_t>();
    if (doc.contains("grid_step_s")) c.grid_step_s = get_int(doc["grid_step_s"], "grid_step_s");
    if (doc.contains("eval_step_s")) c.eval_step_s = get_int(doc["eval_step_s"], "eval_step_s");
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return config_from_json(doc);
}

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.capacities = {100, 15, 15};
    // Trucks/hour by hour of day: quiet mornings, an evening rush of
    // overnight parkers. These are stand-in values, not calibrated demand.
    c.arrivals.hourly_rates = {21, 14, 11, 8, 8, 8, 8, 8, 8, 8, 8, 8,
                               8, 8, 8, 8, 8, 275, 275, 275, 275, 138, 69, 34};
    c.arrivals.weekday_multipliers = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    c.durations.components = {{0.6, 45.0, 15.0}, {0.4, 600.0, 90.0}};
    c.durations.min_duration_minutes = 5.0;
    c.horizon_days = 22;
    c.master_seed = 20190401;
    c.grid_step_s = 60;
    c.eval_step_s = 300;
    return c;
}

} // namespace truckpark
