#include "truckpark/warp.hpp"

#include <cmath>

#include "truckpark/error.hpp"
#include "truckpark/kernels.hpp"
#include "truckpark/scenario.hpp"

namespace truckpark {

double DailyProfile::at(double t_day) const {
    if (values.size() == 1) return values.front();
    return kernels::warp_lookup(values, static_cast<double>(bin_s), t_day, 1.0, 0.0);
}

double warped_value(const DailyProfile& profile, const WarpParams& params, double t_day) {
    if (profile.values.size() == 1) return params.alpha * profile.values.front();
    return params.alpha *
           kernels::warp_lookup(profile.values, static_cast<double>(profile.bin_s), t_day, params.beta, params.tau_s);
}

void check_profile(const DailyProfile& profile) {
    if (profile.bin_s <= 0 || kSecondsPerDay % profile.bin_s != 0) {
        throw InvariantError("profile bin_s must divide 86400");
    }
    if (profile.values.size() != static_cast<std::size_t>(kSecondsPerDay / profile.bin_s)) {
        throw InvariantError("profile must have exactly 86400 / bin_s values");
    }
    for (double v : profile.values) {
        if (!std::isfinite(v) || v < 0) throw InvariantError("profile values must be finite and >= 0");
    }
}

DailyProfile daily_mean_profile(const ObservedSeries& scaled, const std::set<std::int64_t>& training_days,
                                std::int64_t bin_s) {
    if (training_days.empty()) throw ConfigError("daily_mean_profile needs at least one training day");
    if (bin_s <= 0 || kSecondsPerDay % bin_s != 0) throw ConfigError("profile bin_s must divide 86400");
    if (scaled.scaled_ratio.size() != scaled.observed_count.size()) {
        throw InvariantError("daily_mean_profile needs a scaled series");
    }
    const auto bins = static_cast<std::size_t>(kSecondsPerDay / bin_s);

    DailyProfile profile;
    profile.bin_s = bin_s;
    profile.values.assign(bins, 0.0);

    std::vector<double> sum(bins);
    std::vector<std::int64_t> count(bins);
    for (const std::int64_t day : training_days) {
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        const std::int64_t day_start = day * kSecondsPerDay;
        for (std::size_t i = 0; i < scaled.size(); ++i) {
            const std::int64_t t = scaled.time_at(i) - scaled.start_s;
            if (t < day_start || t >= day_start + kSecondsPerDay) continue;
            const auto b = static_cast<std::size_t>((t - day_start) / bin_s);
            sum[b] += scaled.scaled_ratio[i];
            ++count[b];
        }
        double carry = 0.0;
        for (std::size_t b = 0; b < bins; ++b) {
            if (count[b] > 0) carry = sum[b] / static_cast<double>(count[b]);
            profile.values[b] += carry;
        }
    }
    for (double& v : profile.values) v /= static_cast<double>(training_days.size());
    return profile;
}

WarpRegularization default_regularization(std::size_t samples) {
    const auto n = static_cast<double>(samples);
    return {kLambdaBetaPerSample * n, kLambdaTauPerSample * n};
}

double warp_objective(const DailyProfile& profile, std::span<const double> t_day, std::span<const double> y,
                      const WarpParams& p, const WarpRegularization& reg) {
    double sse = 0;
    for (std::size_t i = 0; i < t_day.size(); ++i) {
        const double f = kernels::warp_lookup(profile.values, static_cast<double>(profile.bin_s), t_day[i], p.beta,
                                              p.tau_s);
        const double r = y[i] - p.alpha * f;
        sse += r * r;
    }
    const double tau_h = p.tau_s / 3600.0;
    return sse + reg.lambda_beta * (p.beta - 1.0) * (p.beta - 1.0) + reg.lambda_tau * tau_h * tau_h;
}

namespace {

struct CellScore {
    WarpParams params;
    double objective;
};

class CellScorer {
public:
    CellScorer(const DailyProfile& profile, std::span<const double> t, std::span<const double> y,
               const WarpRegularization& reg)
        : profile_(profile), t_(t), y_(y), reg_(reg), kernel_(kernels::active().warp_moments) {
        for (double v : y) syy_ += v * v;
    }

    CellScore score(double beta, double tau) const {
        const auto m = kernel_(profile_.values, static_cast<double>(profile_.bin_s), t_, y_, beta, tau);
        const double alpha = (m.yf > 0 && m.ff > 0) ? m.yf / m.ff : 0.0;
        const double sse = syy_ - 2.0 * alpha * m.yf + alpha * alpha * m.ff;
        const double tau_h = tau / 3600.0;
        const double obj = sse + reg_.lambda_beta * (beta - 1.0) * (beta - 1.0) + reg_.lambda_tau * tau_h * tau_h;
        return {{alpha, beta, tau}, obj};
    }

private:
    const DailyProfile& profile_;
    std::span<const double> t_;
    std::span<const double> y_;
    WarpRegularization reg_;
    kernels::WarpMomentsFn kernel_;
    double syy_ = 0;
};

} // namespace

WarpFit fit_warp(const DailyProfile& profile, std::span<const double> t_day, std::span<const double> y,
                 const WarpRegularization& reg, const WarpSearch& search) {
    if (t_day.empty() || t_day.size() != y.size()) throw InvariantError("fit_warp needs at least one sample");
    if (profile.values.size() < 2) throw InvariantError("fit_warp needs a profile with at least two knots");

    bool all_zero = true;
    for (double v : profile.values) all_zero = all_zero && v == 0.0;
    if (all_zero) {
        WarpFit fit;
        fit.degenerate = true;
        fit.objective = warp_objective(profile, t_day, y, fit.params, reg);
        return fit;
    }

    const CellScorer scorer(profile, t_day, y, reg);
    CellScore best = scorer.score(1.0, 0.0);
    const auto consider = [&](double beta, double tau) {
        const CellScore s = scorer.score(beta, tau);
        if (s.objective < best.objective) best = s;
    };

    // Grid coordinates come from integer indices; beta is snapped so the
    // identity (beta 1, tau 0) is exactly a node.
    const auto beta_cells = static_cast<int>(std::llround((search.beta_max - search.beta_min) / search.beta_step));
    const auto tau_cells = static_cast<int>(std::llround(2.0 * search.tau_max_s / search.tau_step_s));
    for (int bi = 0; bi <= beta_cells; ++bi) {
        double beta = search.beta_min + bi * search.beta_step;
        if (std::abs(beta - 1.0) < 1e-9) beta = 1.0;
        for (int ti = 0; ti <= tau_cells; ++ti) {
            consider(beta, -search.tau_max_s + ti * search.tau_step_s);
        }
    }

    const CellScore coarse = best;
    for (int db = -1; db <= 1; ++db) {
        const double beta = coarse.params.beta + db * search.beta_step / 2.0;
        if (beta < search.beta_min - 1e-12 || beta > search.beta_max + 1e-12) continue;
        for (int dt = -1; dt <= 1; ++dt) {
            if (db == 0 && dt == 0) continue;
            const double tau = coarse.params.tau_s + dt * search.tau_step_s / 2.0;
            if (std::abs(tau) > search.tau_max_s + 1e-9) continue;
            consider(beta, tau);
        }
    }
    return {best.params, best.objective, false};
}

} // namespace truckpark
