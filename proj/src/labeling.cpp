#include "truckpark/labeling.hpp"

#include <algorithm>
#include <cmath>

#include "truckpark/error.hpp"
#include "truckpark/kernels.hpp"

namespace truckpark {

const char* label_token(StateLabel label) {
    switch (label) {
    case StateLabel::Empty: return "empty";
    case StateLabel::SlightlyFilled: return "slightly_filled";
    case StateLabel::Full: return "full";
    }
    return "?";
}

const char* label_display_name(StateLabel label) {
    switch (label) {
    case StateLabel::Empty: return "empty";
    case StateLabel::SlightlyFilled: return "slightly filled";
    case StateLabel::Full: return "full";
    }
    return "?";
}

std::optional<StateLabel> parse_label(std::string_view token) {
    if (token == "empty") return StateLabel::Empty;
    if (token == "slightly_filled") return StateLabel::SlightlyFilled;
    if (token == "full") return StateLabel::Full;
    return std::nullopt;
}

Thresholds::Thresholds(double filled, double full) : filled_(filled), full_(full) {
    if (!(std::isfinite(filled) && std::isfinite(full) && filled > 0 && filled < full && full <= 1.5)) {
        throw ConfigError("thresholds must satisfy 0 < theta_filled < theta_full <= 1.5");
    }
}

double Thresholds::lower_bound(StateLabel label) const {
    switch (label) {
    case StateLabel::Empty: return 0.0;
    case StateLabel::SlightlyFilled: return filled_;
    case StateLabel::Full: return full_;
    }
    return 0.0;
}

Thresholds reference_thresholds() { return Thresholds(0.75, 0.95); }

StateLabel base_label(double ratio, const Thresholds& th) {
    if (ratio >= th.full()) return StateLabel::Full;
    if (ratio >= th.filled()) return StateLabel::SlightlyFilled;
    return StateLabel::Empty;
}

StateLabel label_point(double ratio, const Thresholds& th, double band, StateLabel previous) {
    const StateLabel base = base_label(ratio, th);
    if (base == previous || band <= 0) return base;
    if (base > previous) {
        // Highest level above `previous` whose bound is cleared by the band.
        for (int l = static_cast<int>(base); l > static_cast<int>(previous); --l) {
            const auto level = static_cast<StateLabel>(l);
            if (ratio >= th.lower_bound(level) + band) return level;
        }
        return previous;
    }
    // Lowest level below `previous` that the ratio has left by the band.
    for (int l = static_cast<int>(base); l < static_cast<int>(previous); ++l) {
        const auto above = static_cast<StateLabel>(l + 1);
        if (ratio < th.lower_bound(above) - band) return static_cast<StateLabel>(l);
    }
    return previous;
}

std::vector<StateLabel> label_online(std::span<const double> values, const Thresholds& th, double band) {
    std::vector<StateLabel> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.push_back(i == 0 ? base_label(values[i], th) : label_point(values[i], th, band, out.back()));
    }
    return out;
}

namespace {

std::size_t window_samples(std::int64_t window_s, std::int64_t step_s) {
    if (window_s < step_s) throw ConfigError("smoothing window must be >= the grid step");
    return static_cast<std::size_t>((window_s + step_s - 1) / step_s);
}

} // namespace

ObservedSeries smooth_causal(const ObservedSeries& series, std::int64_t window_s) {
    const std::size_t w = window_samples(window_s, series.step_s);
    ObservedSeries out = series;
    kernels::active().trailing_mean(series.scaled_ratio, w, out.scaled_ratio);
    return out;
}

ObservedSeries smooth_centered(const ObservedSeries& series, std::int64_t window_s) {
    const std::size_t half = window_samples(window_s, series.step_s) / 2;
    ObservedSeries out = series;
    const std::size_t n = series.scaled_ratio.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        double sum = 0;
        for (std::size_t k = lo; k <= hi; ++k) sum += series.scaled_ratio[k];
        out.scaled_ratio[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<double> sample_at_ticks(const ObservedSeries& series, std::int64_t eval_step_s) {
    if (eval_step_s % series.step_s != 0) throw ConfigError("eval step must be a multiple of the grid step");
    const auto stride = static_cast<std::size_t>(eval_step_s / series.step_s);
    std::vector<double> out;
    out.reserve(series.scaled_ratio.size() / stride + 1);
    for (std::size_t i = 0; i < series.scaled_ratio.size(); i += stride) out.push_back(series.scaled_ratio[i]);
    return out;
}

LabelSeries ground_truth_labels(const OccupancySeries& truth, const Thresholds& th, std::int64_t eval_step_s) {
    if (eval_step_s % truth.step_s != 0) throw ConfigError("eval step must be a multiple of the grid step");
    const auto stride = static_cast<std::size_t>(eval_step_s / truth.step_s);
    LabelSeries out;
    out.start_s = truth.start_s;
    out.step_s = eval_step_s;
    for (std::size_t i = 0; i < truth.size(); i += stride) out.labels.push_back(base_label(truth.ratio(i), th));
    return out;
}

} // namespace truckpark
