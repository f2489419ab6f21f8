#include "truckpark/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "truckpark/error.hpp"
#include "truckpark/scenario.hpp"

namespace truckpark {

namespace {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Results
/// must be written to per-index slots, which keeps the output deterministic.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

// ---------------------------------------------------------------------------

ThresholdGrid ThresholdGrid::default_grid() {
    ThresholdGrid g;
    // Built from integer percentages so 0.75 and 0.95 are the same doubles
    // as the literals.
    for (int k = 50; k <= 90; k += 5) g.filled.push_back(k / 100.0);
    for (int k = 85; k <= 105; ++k) g.full.push_back(k / 100.0);
    return g;
}

SegmentScore& SegmentScore::operator+=(const SegmentScore& o) {
    matched += o.matched;
    misses += o.misses;
    false_alarms += o.false_alarms;
    sum_abs_delay_s += o.sum_abs_delay_s;
    return *this;
}

double calibration_objective(const SegmentScore& s, const CalibrationOptions& options) {
    const double mean_abs_min = s.matched > 0 ? s.sum_abs_delay_s / static_cast<double>(s.matched) / 60.0 : 0.0;
    return mean_abs_min + options.miss_penalty_min * static_cast<double>(s.misses + s.false_alarms);
}

ThresholdCalibrator::ThresholdCalibrator(std::span<const double> estimate, const LabelSeries& truth,
                                         const ThresholdGrid& grid, const CalibrationOptions& options,
                                         std::size_t segment_ticks)
    : options_(options) {
    if (estimate.size() != truth.size()) throw InvariantError("estimate and truth must cover the same ticks");
    for (double f : grid.filled) {
        for (double u : grid.full) {
            if (f < u && f > 0 && u <= 1.5) cells_.emplace_back(f, u);
        }
    }
    if (cells_.empty()) throw ConfigError("threshold grid is empty after enforcing theta_filled < theta_full");
    const std::size_t n = estimate.size();
    const std::size_t seg = segment_ticks == 0 ? std::max<std::size_t>(n, 1) : segment_ticks;
    segments_ = (n + seg - 1) / seg;

    // Truth transitions per segment do not depend on the cell.
    std::vector<std::vector<Transition>> truth_tr(segments_);
    for (std::size_t s = 0; s < segments_; ++s) {
        LabelSeries part;
        part.step_s = truth.step_s;
        part.start_s = truth.time_at(s * seg);
        const auto lo = truth.labels.begin() + static_cast<std::ptrdiff_t>(s * seg);
        part.labels.assign(lo, lo + static_cast<std::ptrdiff_t>(std::min(seg, n - s * seg)));
        truth_tr[s] = extract_transitions(part);
    }

    scores_.resize(cells_.size() * segments_);
    parallel_for(cells_.size(), [&](std::size_t c) {
        for (std::size_t s = 0; s < segments_; ++s) {
            const std::size_t len = std::min(seg, n - s * seg);
            LabelSeries part;
            part.step_s = truth.step_s;
            part.start_s = truth.time_at(s * seg);
            part.labels = label_online(estimate.subspan(s * seg, len), cells_[c], options_.hysteresis_band);
            const MatchResult m = match_transitions(truth_tr[s], extract_transitions(part), options_.windows);
            SegmentScore& out = scores_[c * segments_ + s];
            out.matched = static_cast<std::int64_t>(m.matches.size());
            out.misses = static_cast<std::int64_t>(m.misses.size());
            out.false_alarms = static_cast<std::int64_t>(m.false_alarms.size());
            for (const auto& r : m.matches) out.sum_abs_delay_s += static_cast<double>(std::abs(r.delay_s));
        }
    });
}

SegmentScore ThresholdCalibrator::score(std::size_t cell, std::span<const bool> include) const {
    SegmentScore total;
    for (std::size_t s = 0; s < segments_; ++s) {
        if (include[s]) total += scores_[cell * segments_ + s];
    }
    return total;
}

Thresholds ThresholdCalibrator::best(std::span<const bool> include) const {
    if (include.size() != segments_) throw InvariantError("segment mask has the wrong length");
    const Thresholds preferred = reference_thresholds();
    std::size_t best_cell = 0;
    double best_obj = 0;
    bool have = false;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const double obj = calibration_objective(score(c, include), options_);
        const auto& cand = cells_[c];
        const auto& cur = cells_[best_cell];
        bool take = !have || obj < best_obj;
        if (have && obj == best_obj) {
            if (cand == preferred) {
                take = true;
            } else if (!(cur == preferred)) {
                take = std::pair(cand.filled(), cand.full()) < std::pair(cur.filled(), cur.full());
            }
        }
        if (take) {
            best_cell = c;
            best_obj = obj;
            have = true;
        }
    }
    return cells_[best_cell];
}

Thresholds ThresholdCalibrator::best_all() const {
    const std::unique_ptr<bool[]> mask(new bool[segments_]);
    std::fill_n(mask.get(), segments_, true);
    return best(std::span<const bool>(mask.get(), segments_));
}

Thresholds ThresholdCalibrator::best_excluding(std::size_t segment) const {
    const std::unique_ptr<bool[]> mask(new bool[segments_]);
    for (std::size_t s = 0; s < segments_; ++s) mask[s] = s != segment;
    return best(std::span<const bool>(mask.get(), segments_));
}

Thresholds grid_search_thresholds(std::span<const double> estimate, const LabelSeries& truth,
                                  const ThresholdGrid& grid, const CalibrationOptions& options) {
    return ThresholdCalibrator(estimate, truth, grid, options).best_all();
}

// ---------------------------------------------------------------------------

std::vector<double> naive_estimate_values(const ObservedSeries& scaled, std::int64_t window_s,
                                          std::int64_t eval_step_s) {
    return sample_at_ticks(smooth_causal(scaled, window_s), eval_step_s);
}

LabelSeries estimate_labels_naive(const ObservedSeries& scaled, const Thresholds& thresholds,
                                  const NaiveOptions& options, std::int64_t eval_step_s) {
    LabelSeries out;
    out.start_s = scaled.start_s;
    out.step_s = eval_step_s;
    out.labels = label_online(naive_estimate_values(scaled, options.window_s, eval_step_s), thresholds,
                              options.hysteresis_band);
    return out;
}

std::vector<StateLabel> label_with_schedule(std::span<const double> values, std::span<const Thresholds> per_day,
                                            std::size_t ticks_per_day, double band) {
    if (ticks_per_day == 0 || per_day.size() * ticks_per_day < values.size()) {
        throw InvariantError("threshold schedule does not cover the series");
    }
    std::vector<StateLabel> out;
    out.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const Thresholds& th = per_day[i / ticks_per_day];
        out.push_back(i == 0 ? base_label(values[i], th) : label_point(values[i], th, band, out.back()));
    }
    return out;
}

// ---------------------------------------------------------------------------

DayCurve meanday_day_curve(const DailyProfile& profile, std::span<const double> observed,
                           std::span<const double> fallback, std::int64_t eval_step_s,
                           const MeandayOptions& options) {
    if (fallback.size() != observed.size()) throw InvariantError("fallback must align with the observations");
    if (options.refit_every_s <= 0) throw ConfigError("refit_every_s must be > 0");
    check_profile(profile);

    const std::size_t n = observed.size();
    std::vector<double> t_day(n);
    for (std::size_t k = 0; k < n; ++k) t_day[k] = static_cast<double>(static_cast<std::int64_t>(k) * eval_step_s);

    DayCurve curve;
    curve.fitted.resize(n);
    curve.params.resize(n);
    curve.degenerate.resize(n);
    WarpFit fit;
    bool have_fit = false;
    for (std::size_t k = 0; k < n; ++k) {
        const auto now = static_cast<std::int64_t>(k) * eval_step_s;
        if (!have_fit || now % options.refit_every_s == 0) {
            const std::size_t samples = k + 1;
            WarpRegularization reg{options.lambda_beta_per_sample * static_cast<double>(samples),
                                   options.lambda_tau_per_sample * static_cast<double>(samples)};
            fit = fit_warp(profile, std::span(t_day).first(samples), observed.first(samples), reg, options.search);
            have_fit = true;
        }
        curve.params[k] = fit.params;
        curve.degenerate[k] = fit.degenerate;
        curve.fitted[k] = fit.degenerate ? fallback[k] : warped_value(profile, fit.params, t_day[k]);
    }
    return curve;
}

DayCurve meanday_estimate_values(std::span<const DailyProfile> per_day_profile, const ObservedSeries& scaled,
                                 std::int64_t eval_step_s, const MeandayOptions& options) {
    const std::vector<double> observed = sample_at_ticks(scaled, eval_step_s);
    const std::vector<double> fallback = naive_estimate_values(scaled, options.fallback_window_s, eval_step_s);
    const auto ticks_per_day = static_cast<std::size_t>(kSecondsPerDay / eval_step_s);
    const std::size_t days = (observed.size() + ticks_per_day - 1) / ticks_per_day;
    if (per_day_profile.size() < days) throw InvariantError("one profile per day is required");

    std::vector<DayCurve> parts(days);
    parallel_for(days, [&](std::size_t d) {
        const std::size_t lo = d * ticks_per_day;
        const std::size_t len = std::min(ticks_per_day, observed.size() - lo);
        parts[d] = meanday_day_curve(per_day_profile[d], std::span(observed).subspan(lo, len),
                                     std::span(fallback).subspan(lo, len), eval_step_s, options);
    });
    DayCurve all;
    for (auto& part : parts) {
        all.fitted.insert(all.fitted.end(), part.fitted.begin(), part.fitted.end());
        all.params.insert(all.params.end(), part.params.begin(), part.params.end());
        all.degenerate.insert(all.degenerate.end(), part.degenerate.begin(), part.degenerate.end());
    }
    return all;
}

LabelSeries estimate_labels_meanday(const DailyProfile& profile, const ObservedSeries& scaled,
                                    const Thresholds& thresholds, const MeandayOptions& options,
                                    std::int64_t eval_step_s) {
    const auto ticks_per_day = static_cast<std::size_t>(kSecondsPerDay / eval_step_s);
    const std::size_t ticks = (scaled.size() * static_cast<std::size_t>(scaled.step_s) +
                               static_cast<std::size_t>(eval_step_s) - 1) /
                              static_cast<std::size_t>(eval_step_s);
    const std::size_t days = (ticks + ticks_per_day - 1) / ticks_per_day;
    const std::vector<DailyProfile> profiles(days, profile);
    const DayCurve curve = meanday_estimate_values(profiles, scaled, eval_step_s, options);
    LabelSeries out;
    out.start_s = scaled.start_s;
    out.step_s = eval_step_s;
    out.labels = label_online(curve.fitted, thresholds, options.hysteresis_band);
    return out;
}

} // namespace truckpark
