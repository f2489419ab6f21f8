#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "truckpark/evaluation.hpp"
#include "truckpark/labeling.hpp"
#include "truckpark/warp.hpp"

namespace truckpark {

// ---------------------------------------------------------------------------
// Threshold calibration

struct ThresholdGrid {
    std::vector<double> filled;
    std::vector<double> full;

    /// filled in {0.50, 0.55, ..., 0.90}, full in {0.85, 0.86, ..., 1.05}.
    static ThresholdGrid default_grid();
};

struct CalibrationOptions {
    double hysteresis_band = kDefaultHysteresisBand;
    MatchWindows windows;
    /// Objective penalty, in minutes, per miss and per false alarm.
    double miss_penalty_min = 60.0;
};

/// Matching outcome of one threshold pair on one segment.
struct SegmentScore {
    std::int64_t matched = 0;
    std::int64_t misses = 0;
    std::int64_t false_alarms = 0;
    double sum_abs_delay_s = 0;

    SegmentScore& operator+=(const SegmentScore& o);
};

/// mean |delay| of matches in minutes (0 without matches) plus the penalty
/// per miss and false alarm.
double calibration_objective(const SegmentScore& score, const CalibrationOptions& options);

/// Exhaustive threshold search over a grid. The estimate is split into
/// segments (days) that are labeled and matched independently, so the
/// search can be restricted to any subset of segments, e.g. leave-one-out.
class ThresholdCalibrator {
public:
    /// `estimate` and `truth` are aligned tick series; `segment_ticks` is the
    /// segment length (the whole series when 0).
    ThresholdCalibrator(std::span<const double> estimate, const LabelSeries& truth, const ThresholdGrid& grid,
                        const CalibrationOptions& options, std::size_t segment_ticks = 0);

    std::size_t segment_count() const { return segments_; }
    const std::vector<Thresholds>& cells() const { return cells_; }

    /// Score of cell c summed over the included segments.
    SegmentScore score(std::size_t cell, std::span<const bool> include) const;

    /// Minimum-objective cell over the included segments. Ties prefer the
    /// reference pair (0.75, 0.95), then the lexicographically smallest pair.
    Thresholds best(std::span<const bool> include) const;
    Thresholds best_all() const;
    Thresholds best_excluding(std::size_t segment) const;

private:
    std::vector<Thresholds> cells_;
    std::size_t segments_ = 0;
    CalibrationOptions options_;
    std::vector<SegmentScore> scores_; // cells_ x segments_
};

/// Grid search on one contiguous series; throws if no grid pair satisfies
/// filled < full.
Thresholds grid_search_thresholds(std::span<const double> estimate, const LabelSeries& truth,
                                  const ThresholdGrid& grid = ThresholdGrid::default_grid(),
                                  const CalibrationOptions& options = {});

// ---------------------------------------------------------------------------
// Naive estimation: threshold the causally smoothed observation.

struct NaiveOptions {
    std::int64_t window_s = 1800;
    double hysteresis_band = kDefaultHysteresisBand;
};

/// Smoothed scaled ratio at every eval tick.
std::vector<double> naive_estimate_values(const ObservedSeries& scaled, std::int64_t window_s,
                                          std::int64_t eval_step_s);

LabelSeries estimate_labels_naive(const ObservedSeries& scaled, const Thresholds& thresholds,
                                  const NaiveOptions& options, std::int64_t eval_step_s);

/// Labels a tick series online, switching thresholds at every day boundary
/// (`ticks_per_day` ticks per entry of `per_day`). The hysteresis state
/// carries over midnight.
std::vector<StateLabel> label_with_schedule(std::span<const double> values, std::span<const Thresholds> per_day,
                                            std::size_t ticks_per_day, double hysteresis_band);

// ---------------------------------------------------------------------------
// Mean-day estimation: stretch-fit the daily profile to today's prefix.

struct MeandayOptions {
    std::int64_t refit_every_s = 300;
    // Regularizer weights per today sample: lambda_beta = lambda_beta_per_sample * n,
    // lambda_tau = lambda_tau_per_sample * n.
    double lambda_beta_per_sample = kLambdaBetaPerSample;
    double lambda_tau_per_sample = kLambdaTauPerSample;
    double hysteresis_band = kDefaultHysteresisBand;
    std::int64_t fallback_window_s = 1800; // naive smoothing when the fit is degenerate
    WarpSearch search;
};

struct DayCurve {
    std::vector<double> fitted;
    std::vector<WarpParams> params;
    std::vector<bool> degenerate;
};

/// Online fit over one day. `observed` holds the scaled ratio at the day's
/// ticks; tick k uses only observed[0..k]. Degenerate ticks take `fallback[k]`.
DayCurve meanday_day_curve(const DailyProfile& profile, std::span<const double> observed,
                           std::span<const double> fallback, std::int64_t eval_step_s,
                           const MeandayOptions& options);

/// Fitted value at every eval tick of a multi-day series, one profile per day.
DayCurve meanday_estimate_values(std::span<const DailyProfile> per_day_profile, const ObservedSeries& scaled,
                                 std::int64_t eval_step_s, const MeandayOptions& options);

LabelSeries estimate_labels_meanday(const DailyProfile& profile, const ObservedSeries& scaled,
                                    const Thresholds& thresholds, const MeandayOptions& options,
                                    std::int64_t eval_step_s);

} // namespace truckpark
