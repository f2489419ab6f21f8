#include "truckpark/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace truckpark {

std::vector<Transition> extract_transitions(const LabelSeries& labels) {
    std::vector<Transition> out;
    for (std::size_t i = 1; i < labels.size(); ++i) {
        const StateLabel prev = labels.labels[i - 1];
        const StateLabel cur = labels.labels[i];
        if (prev == cur) continue;
        const std::int64_t t = labels.time_at(i);
        const int step = cur > prev ? 1 : -1;
        for (int l = static_cast<int>(prev); l != static_cast<int>(cur); l += step) {
            out.push_back({t, static_cast<StateLabel>(l), static_cast<StateLabel>(l + step)});
        }
    }
    return out;
}

namespace {

bool chronological(const Transition& a, const Transition& b) {
    if (a.time_s != b.time_s) return a.time_s < b.time_s;
    if (a.from != b.from) return a.from < b.from;
    return a.to < b.to;
}

} // namespace

MatchResult match_transitions(std::vector<Transition> truth, std::vector<Transition> estimate,
                              const MatchWindows& windows) {
    std::stable_sort(truth.begin(), truth.end(), chronological);
    std::stable_sort(estimate.begin(), estimate.end(), chronological);

    // Estimate indices per transition type, in time order.
    std::array<std::vector<std::size_t>, 4> by_pair;
    for (std::size_t j = 0; j < estimate.size(); ++j) {
        if (auto pi = pair_index(estimate[j].from, estimate[j].to)) by_pair[*pi].push_back(j);
    }
    std::vector<bool> used(estimate.size(), false);
    // Window starts only move forward, so candidates before a cursor are dead.
    std::array<std::size_t, 4> cursor{0, 0, 0, 0};

    MatchResult result;
    for (const Transition& t : truth) {
        std::optional<std::size_t> pick;
        if (const auto pi = pair_index(t.from, t.to)) {
            const auto& cand = by_pair[*pi];
            std::size_t& k = cursor[*pi];
            const std::int64_t lo = t.time_s - windows.early_s;
            const std::int64_t hi = t.time_s + windows.late_s;
            while (k < cand.size() && estimate[cand[k]].time_s < lo) ++k;
            for (std::size_t c = k; c < cand.size() && estimate[cand[c]].time_s <= hi; ++c) {
                if (!used[cand[c]]) {
                    pick = cand[c];
                    break;
                }
            }
        }
        if (pick) {
            used[*pick] = true;
            result.matches.push_back({t, estimate[*pick], estimate[*pick].time_s - t.time_s});
        } else {
            result.misses.push_back(t);
        }
    }
    for (std::size_t j = 0; j < estimate.size(); ++j) {
        if (!used[j]) result.false_alarms.push_back(estimate[j]);
    }
    return result;
}

std::optional<std::size_t> pair_index(StateLabel from, StateLabel to) {
    for (std::size_t i = 0; i < kTransitionPairs.size(); ++i) {
        if (kTransitionPairs[i].first == from && kTransitionPairs[i].second == to) return i;
    }
    return std::nullopt;
}

bool is_critical_pair(StateLabel from, StateLabel to) {
    return (from == StateLabel::Full && to == StateLabel::SlightlyFilled) ||
           (from == StateLabel::SlightlyFilled && to == StateLabel::Full);
}

std::optional<double> PairStats::mean_signed_delay_min() const {
    if (matched == 0) return std::nullopt;
    return sum_signed_delay_s / static_cast<double>(matched) / 60.0;
}

std::optional<double> PairStats::mean_abs_delay_min() const {
    if (matched == 0) return std::nullopt;
    return sum_abs_delay_s / static_cast<double>(matched) / 60.0;
}

const PairStats& DelayTable::at(StateLabel from, StateLabel to) const {
    return pairs[pair_index(from, to).value()];
}

std::optional<double> DelayTable::critical_mean_abs_delay_min() const {
    const auto a = at(StateLabel::Full, StateLabel::SlightlyFilled).mean_abs_delay_min();
    const auto b = at(StateLabel::SlightlyFilled, StateLabel::Full).mean_abs_delay_min();
    if (!a || !b) return std::nullopt;
    return (*a + *b) / 2.0;
}

DelayTable delay_table(const MatchResult& result) {
    DelayTable table;
    for (std::size_t i = 0; i < kTransitionPairs.size(); ++i) {
        table.pairs[i].from = kTransitionPairs[i].first;
        table.pairs[i].to = kTransitionPairs[i].second;
    }
    for (const auto& m : result.matches) {
        auto& s = table.pairs[pair_index(m.truth.from, m.truth.to).value()];
        ++s.matched;
        s.sum_signed_delay_s += static_cast<double>(m.delay_s);
        s.sum_abs_delay_s += static_cast<double>(m.delay_s < 0 ? -m.delay_s : m.delay_s);
    }
    for (const auto& t : result.misses) {
        if (auto i = pair_index(t.from, t.to)) ++table.pairs[*i].missed;
    }
    for (const auto& t : result.false_alarms) {
        if (auto i = pair_index(t.from, t.to)) ++table.pairs[*i].false_alarms;
    }
    return table;
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::string format_minutes(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f'", v);
    return buf;
}

} // namespace

std::string render_delay_table(const DelayTable& table, const std::string& caption) {
    constexpr std::array<StateLabel, 3> order{StateLabel::Full, StateLabel::SlightlyFilled, StateLabel::Empty};
    constexpr std::size_t kRowHead = 17;
    constexpr std::size_t kCell = 17;
    std::ostringstream out;
    out << pad_right("from \\ to", kRowHead) << "|";
    for (StateLabel to : order) out << pad_left(label_display_name(to), kCell);
    out << "\n" << std::string(kRowHead, '-') << "+" << std::string(kCell * order.size(), '-') << "\n";
    for (StateLabel from : order) {
        out << pad_right(label_display_name(from), kRowHead) << "|";
        for (StateLabel to : order) {
            std::string cell = "-";
            if (pair_index(from, to)) {
                const auto mean = table.at(from, to).mean_signed_delay_min();
                if (mean) {
                    cell = format_minutes(*mean);
                    if (is_critical_pair(from, to)) cell = "**" + cell + "**";
                }
            }
            out << pad_left(cell, kCell);
        }
        out << "\n";
    }
    out << caption << "\n\n";
    out << pad_right("transition", 34) << pad_left("mean |delay|", 13) << pad_left("matched", 9)
        << pad_left("missed", 8) << pad_left("false", 7) << "\n";
    for (const auto& s : table.pairs) {
        const std::string name = std::string(label_display_name(s.from)) + " -> " + label_display_name(s.to);
        const auto abs_mean = s.mean_abs_delay_min();
        out << pad_right(name, 34) << pad_left(abs_mean ? format_minutes(*abs_mean) : "-", 13)
            << pad_left(std::to_string(s.matched), 9) << pad_left(std::to_string(s.missed), 8)
            << pad_left(std::to_string(s.false_alarms), 7) << "\n";
    }
    return out.str();
}

nlohmann::json delay_table_to_json(const DelayTable& table) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& s : table.pairs) {
        nlohmann::json entry = {
            {"from", label_token(s.from)},
            {"to", label_token(s.to)},
            {"critical", is_critical_pair(s.from, s.to)},
            {"matched", s.matched},
            {"missed", s.missed},
            {"false_alarms", s.false_alarms},
        };
        const auto sgn = s.mean_signed_delay_min();
        const auto abs = s.mean_abs_delay_min();
        entry["mean_signed_delay_min"] = sgn ? nlohmann::json(*sgn) : nlohmann::json(nullptr);
        entry["mean_abs_delay_min"] = abs ? nlohmann::json(*abs) : nlohmann::json(nullptr);
        pairs.push_back(std::move(entry));
    }
    return {{"pairs", pairs}};
}

nlohmann::json results_document(const ResultsMeta& meta, const DelayTable& table, const MatchResult& result) {
    const auto transition_json = [](const Transition& t) {
        return nlohmann::json{{"time_s", t.time_s}, {"from", label_token(t.from)}, {"to", label_token(t.to)}};
    };
    nlohmann::json doc;
    doc["format"] = "truckpark.results";
    doc["format_version"] = 1;
    doc["scenario_fingerprint"] = meta.scenario_fingerprint;
    doc["penetration"] = meta.penetration ? nlohmann::json(*meta.penetration) : nlohmann::json(nullptr);
    doc["method"] = meta.method;
    nlohmann::json th = nlohmann::json::array();
    for (const auto& [filled, full] : meta.thresholds) th.push_back({{"theta_filled", filled}, {"theta_full", full}});
    doc["thresholds"] = th;
    doc["delay_table"] = delay_table_to_json(table);
    nlohmann::json matches = nlohmann::json::array();
    for (const auto& m : result.matches) {
        matches.push_back({{"truth", transition_json(m.truth)},
                           {"estimate", transition_json(m.estimate)},
                           {"delay_s", m.delay_s}});
    }
    doc["matches"] = matches;
    nlohmann::json misses = nlohmann::json::array();
    for (const auto& t : result.misses) misses.push_back(transition_json(t));
    doc["misses"] = misses;
    nlohmann::json fas = nlohmann::json::array();
    for (const auto& t : result.false_alarms) fas.push_back(transition_json(t));
    doc["false_alarms"] = fas;
    return doc;
}

} // namespace truckpark
