#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "truckpark/observation.hpp"
#include "truckpark/sim_engine.hpp"

namespace truckpark {

/// Discrete lot state, ordered by occupancy.
enum class StateLabel : std::uint8_t { Empty = 0, SlightlyFilled = 1, Full = 2 };

const char* label_token(StateLabel label);          // empty | slightly_filled | full
const char* label_display_name(StateLabel label);   // empty | slightly filled | full
std::optional<StateLabel> parse_label(std::string_view token);

/// Ratio thresholds: ratio >= filled gives SlightlyFilled, ratio >= full gives Full.
class Thresholds {
public:
    /// Requires 0 < filled < full <= 1.5.
    Thresholds(double filled, double full);
    double filled() const { return filled_; }
    double full() const { return full_; }
    bool operator==(const Thresholds&) const = default;

    /// The lower bound of `label`'s band (0 for Empty).
    double lower_bound(StateLabel label) const;

private:
    double filled_;
    double full_;
};

inline constexpr double kDefaultHysteresisBand = 0.02;

/// Reference discretization used for ground truth.
Thresholds reference_thresholds();

/// Discretization without hysteresis.
StateLabel base_label(double ratio, const Thresholds& thresholds);

/// Discretization with hysteresis. Moving up to a level L needs
/// ratio >= lower_bound(L) + band; moving down below L needs
/// ratio < lower_bound(L) - band. Otherwise `previous` is kept. With
/// band == 0 this is base_label.
StateLabel label_point(double ratio, const Thresholds& thresholds, double hysteresis_band, StateLabel previous);

struct LabelSeries {
    std::int64_t start_s = 0;
    std::int64_t step_s = 300;
    std::vector<StateLabel> labels;

    std::size_t size() const { return labels.size(); }
    std::int64_t time_at(std::size_t i) const { return start_s + static_cast<std::int64_t>(i) * step_s; }
    bool operator==(const LabelSeries&) const = default;
};

/// Online labeling: the first value takes base_label, every later value is
/// labeled against the previous emitted label.
std::vector<StateLabel> label_online(std::span<const double> values, const Thresholds& thresholds,
                                     double hysteresis_band);

/// Trailing mean of scaled_ratio over (t - window_s, t]. Uses only samples at
/// or before t; the first points average over the available prefix.
ObservedSeries smooth_causal(const ObservedSeries& series, std::int64_t window_s);

/// Centered mean over [t - window_s/2, t + window_s/2]. Looks ahead, so it is
/// for offline figure export only.
ObservedSeries smooth_centered(const ObservedSeries& series, std::int64_t window_s);

/// Samples a grid series at every `eval_step_s`-th second starting at start_s.
std::vector<double> sample_at_ticks(const ObservedSeries& series, std::int64_t eval_step_s);

/// Zero-hysteresis labels of the true ratio at eval ticks.
LabelSeries ground_truth_labels(const OccupancySeries& truth, const Thresholds& thresholds,
                                std::int64_t eval_step_s);

} // namespace truckpark
