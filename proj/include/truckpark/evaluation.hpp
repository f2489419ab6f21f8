#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "truckpark/labeling.hpp"

namespace truckpark {

struct Transition {
    std::int64_t time_s = 0;
    StateLabel from = StateLabel::Empty;
    StateLabel to = StateLabel::SlightlyFilled;
    bool operator==(const Transition&) const = default;
};

/// One transition per tick whose label differs from the previous tick,
/// stamped at the later tick. Two-level jumps become two single-level
/// transitions at the same time, passing through SlightlyFilled.
std::vector<Transition> extract_transitions(const LabelSeries& labels);

struct MatchWindows {
    std::int64_t early_s = 1800;
    std::int64_t late_s = 21600;
};

struct MatchRecord {
    Transition truth;
    Transition estimate;
    std::int64_t delay_s = 0; // estimate - truth; negative means early
};

struct MatchResult {
    std::vector<MatchRecord> matches;
    std::vector<Transition> misses;       // unmatched truth
    std::vector<Transition> false_alarms; // unmatched estimates
};

/// Greedy chronological matching: every true transition, in time order,
/// takes the earliest unmatched estimate of the same (from, to) inside
/// [t - early, t + late]. Inputs are sorted internally.
MatchResult match_transitions(std::vector<Transition> truth, std::vector<Transition> estimate,
                              const MatchWindows& windows = {});

/// The four single-level transition types, in table order.
inline constexpr std::array<std::pair<StateLabel, StateLabel>, 4> kTransitionPairs{{
    {StateLabel::Full, StateLabel::SlightlyFilled},
    {StateLabel::SlightlyFilled, StateLabel::Full},
    {StateLabel::SlightlyFilled, StateLabel::Empty},
    {StateLabel::Empty, StateLabel::SlightlyFilled},
}};

std::optional<std::size_t> pair_index(StateLabel from, StateLabel to);

/// Full <-> SlightlyFilled are the cells that matter for recommendations.
bool is_critical_pair(StateLabel from, StateLabel to);

struct PairStats {
    StateLabel from = StateLabel::Empty;
    StateLabel to = StateLabel::SlightlyFilled;
    std::int64_t matched = 0;
    std::int64_t missed = 0;
    std::int64_t false_alarms = 0;
    double sum_signed_delay_s = 0;
    double sum_abs_delay_s = 0;

    std::optional<double> mean_signed_delay_min() const;
    std::optional<double> mean_abs_delay_min() const;
};

struct DelayTable {
    std::array<PairStats, 4> pairs; // kTransitionPairs order

    const PairStats& at(StateLabel from, StateLabel to) const;
    /// Mean over the two critical cells' mean |delay|; nullopt if either is empty.
    std::optional<double> critical_mean_abs_delay_min() const;
};

DelayTable delay_table(const MatchResult& result);

/// Text table, row = from, column = to, in the order full, slightly filled,
/// empty. Cells show the mean signed delay in minutes with one decimal,
/// "-" where nothing matched; critical cells are wrapped in **.
std::string render_delay_table(const DelayTable& table, const std::string& caption);

nlohmann::json delay_table_to_json(const DelayTable& table);

/// Full results document for one evaluation.
struct ResultsMeta {
    std::string scenario_fingerprint;
    std::optional<double> penetration;
    std::string method;
    std::vector<std::pair<double, double>> thresholds; // one per day, or a single pair
};

nlohmann::json results_document(const ResultsMeta& meta, const DelayTable& table, const MatchResult& result);

} // namespace truckpark
