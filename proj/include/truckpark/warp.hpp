#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "truckpark/observation.hpp"

namespace truckpark {

/// Mean time-of-day curve. Knot b sits at b * bin_s seconds after midnight.
struct DailyProfile {
    std::int64_t bin_s = 300;
    std::vector<double> values;

    /// Linear interpolation between knots, clamped at both ends.
    double at(double t_day) const;
    bool operator==(const DailyProfile&) const = default;
};

/// Checks length == 86400 / bin_s and values finite and >= 0.
void check_profile(const DailyProfile& profile);

/// value(b) = mean over training days of that day's average scaled_ratio in
/// bin b. A bin without samples repeats the previous bin (0 for the first).
/// Days are counted from series start_s.
DailyProfile daily_mean_profile(const ObservedSeries& scaled, const std::set<std::int64_t>& training_days,
                                std::int64_t bin_s = 300);

/// fitted(t_day) = alpha * profile(beta * (t_day - tau)).
struct WarpParams {
    double alpha = 1.0;
    double beta = 1.0;
    double tau_s = 0.0;
    bool operator==(const WarpParams&) const = default;
};

/// alpha * profile(beta * (t_day - tau)), same interpolation as the kernels.
double warped_value(const DailyProfile& profile, const WarpParams& params, double t_day);

/// Search box and coarse steps. The refinement pass uses half steps.
struct WarpSearch {
    double beta_min = 0.5;
    double beta_max = 2.0;
    double beta_step = 0.05;
    double tau_max_s = 14400;
    double tau_step_s = 300;
};

struct WarpFit {
    WarpParams params;
    double objective = 0;
    bool degenerate = false; // all-zero profile; params are the identity
};

struct WarpRegularization {
    double lambda_beta = 0;
    double lambda_tau = 0;
};

// Per-sample regularizer weights. A unit change of beta moves a feature at
// 18:00 by 18 hours, so the beta weight is the tau weight scaled by 18^2; a
// beta step then costs the same as the tau shift it causes in the evening.
inline constexpr double kLambdaTauPerSample = 0.1;
inline constexpr double kLambdaBetaPerSample = 0.1 * 18.0 * 18.0;

/// Default regularization for n samples: each per-sample weight times n.
WarpRegularization default_regularization(std::size_t samples);

/// sum_i (y_i - alpha * profile(beta * (t_i - tau)))^2
///   + lambda_beta * (beta - 1)^2 + lambda_tau * (tau / 3600)^2
double warp_objective(const DailyProfile& profile, std::span<const double> t_day, std::span<const double> y,
                      const WarpParams& params, const WarpRegularization& reg);

/// Coarse grid over (beta, tau) with alpha in closed form (clamped at 0),
/// then one refinement pass at half steps around the best cell. The identity
/// warp is scored first and only a strictly better cell replaces it.
/// Requires at least one sample.
WarpFit fit_warp(const DailyProfile& profile, std::span<const double> t_day, std::span<const double> y,
                 const WarpRegularization& reg, const WarpSearch& search = {});

} // namespace truckpark
