#include "truckpark/pipeline.hpp"

#include <set>

#include "truckpark/error.hpp"

namespace truckpark {

const char* method_name(Method method) {
    switch (method) {
    case Method::Naive: return "naive";
    case Method::Meanday: return "meanday";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& name) {
    if (name == "naive") return Method::Naive;
    if (name == "meanday") return Method::Meanday;
    return std::nullopt;
}

const MethodOutcome& PenetrationOutcome::outcome(Method method) const {
    for (const auto& m : methods) {
        if (m.method == method) return m;
    }
    throw Error(std::string("method not evaluated: ") + method_name(method));
}

namespace {

std::vector<Thresholds> leave_one_out_thresholds(std::span<const double> values, const LabelSeries& truth,
                                                 std::size_t ticks_per_day, std::size_t days,
                                                 const ExperimentOptions& options) {
    const ThresholdCalibrator calibrator(values, truth, options.grid, options.calibration, ticks_per_day);
    std::vector<Thresholds> out;
    out.reserve(days);
    for (std::size_t d = 0; d < days; ++d) out.push_back(calibrator.best_excluding(d));
    return out;
}

void evaluate(MethodOutcome& m, const LabelSeries& truth, std::size_t ticks_per_day, double band,
              const MatchWindows& windows) {
    m.labels.start_s = truth.start_s;
    m.labels.step_s = truth.step_s;
    m.labels.labels = label_with_schedule(m.estimate_values, m.thresholds_per_day, ticks_per_day, band);
    m.matches = match_transitions(extract_transitions(truth), extract_transitions(m.labels), windows);
    m.table = delay_table(m.matches);
}

} // namespace

PenetrationOutcome run_penetration(const ValidatedScenario& scenario, const SimulationResult& sim,
                                   PenetrationRate p, std::span<const Method> methods,
                                   const ExperimentOptions& options) {
    const auto& cfg = scenario.config();
    const auto days = static_cast<std::size_t>(cfg.horizon_days);
    if (days < 2) throw ConfigError("horizon_days must be >= 2 for leave-one-out calibration");
    const auto ticks_per_day = static_cast<std::size_t>(scenario.ticks_per_day());

    PenetrationOutcome out;
    out.penetration = p.value();
    const std::uint64_t seed = options.sampling_seed.value_or(derive_stream_seed(cfg.master_seed, Stream::AppUsers));
    out.flagged = assign_app_users(sim.log, p, seed);
    out.scaled = scale_series(observed_count_series(out.flagged, 0, cfg.grid_step_s, sim.occupancy.size()), p,
                              cfg.capacities.green);
    out.truth = ground_truth_labels(sim.occupancy, options.truth_thresholds, cfg.eval_step_s);
    out.smoothed = naive_estimate_values(out.scaled, options.naive.window_s, cfg.eval_step_s);

    // The naive thresholds are needed by both methods.
    const std::vector<Thresholds> naive_thresholds =
        leave_one_out_thresholds(out.smoothed, out.truth, ticks_per_day, days, options);

    for (const Method method : methods) {
        MethodOutcome m;
        m.method = method;
        if (method == Method::Naive) {
            m.thresholds_per_day = naive_thresholds;
            m.estimate_values = out.smoothed;
            evaluate(m, out.truth, ticks_per_day, options.naive.hysteresis_band, options.calibration.windows);
        } else {
            m.profiles.reserve(days);
            for (std::size_t d = 0; d < days; ++d) {
                std::set<std::int64_t> training;
                for (std::size_t o = 0; o < days; ++o) {
                    if (o != d) training.insert(static_cast<std::int64_t>(o));
                }
                m.profiles.push_back(daily_mean_profile(out.scaled, training, cfg.eval_step_s));
            }
            m.curve = meanday_estimate_values(m.profiles, out.scaled, cfg.eval_step_s, options.meanday);
            m.estimate_values = m.curve.fitted;
            if (options.recalibrate_meanday) {
                CalibrationOptions cal = options.calibration;
                cal.hysteresis_band = options.meanday.hysteresis_band;
                ExperimentOptions recal = options;
                recal.calibration = cal;
                m.thresholds_per_day =
                    leave_one_out_thresholds(m.estimate_values, out.truth, ticks_per_day, days, recal);
            } else {
                m.thresholds_per_day = naive_thresholds;
            }
            evaluate(m, out.truth, ticks_per_day, options.meanday.hysteresis_band, options.calibration.windows);
        }
        out.methods.push_back(std::move(m));
    }
    return out;
}

PlotColumns make_plot_columns(const ValidatedScenario& scenario, const SimulationResult& sim,
                              const PenetrationOutcome& outcome, Method method, const ExperimentOptions& options,
                              bool offline_centered) {
    const auto& cfg = scenario.config();
    const MethodOutcome& m = outcome.outcome(method);
    PlotColumns c;
    c.start_s = 0;
    c.step_s = cfg.eval_step_s;
    c.true_ratio = sample_at_ticks(as_observed(sim.occupancy), cfg.eval_step_s);
    c.scaled_ratio = sample_at_ticks(outcome.scaled, cfg.eval_step_s);
    c.smoothed_ratio = offline_centered
                           ? sample_at_ticks(smooth_centered(outcome.scaled, options.naive.window_s), cfg.eval_step_s)
                           : outcome.smoothed;
    c.fitted_ratio = method == Method::Meanday ? m.curve.fitted : m.estimate_values;
    c.true_labels = outcome.truth.labels;
    c.estimated_labels = m.labels.labels;
    return c;
}

} // namespace truckpark
