#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "truckpark/estimator.hpp"
#include "truckpark/evaluation.hpp"
#include "truckpark/observation.hpp"
#include "truckpark/sim_engine.hpp"
#include "truckpark/timeseries_io.hpp"

namespace truckpark {

enum class Method { Naive, Meanday };

const char* method_name(Method method);
std::optional<Method> parse_method(const std::string& name);

struct ExperimentOptions {
    NaiveOptions naive;
    MeandayOptions meanday;
    CalibrationOptions calibration;
    ThresholdGrid grid = ThresholdGrid::default_grid();
    /// Discretization of the true ratio into reference labels.
    Thresholds truth_thresholds = reference_thresholds();
    /// Re-run the threshold search on the fitted curves instead of reusing
    /// the naive thresholds for the mean-day method.
    bool recalibrate_meanday = false;
    /// App-user sampling seed; defaults to the scenario's app-user stream.
    std::optional<std::uint64_t> sampling_seed;
};

struct MethodOutcome {
    Method method = Method::Naive;
    std::vector<Thresholds> thresholds_per_day; // leave-one-out calibration
    std::vector<double> estimate_values;        // per eval tick
    LabelSeries labels;
    MatchResult matches;
    DelayTable table;
    std::vector<DailyProfile> profiles; // mean-day only, one per day
    DayCurve curve;                     // mean-day only
};

struct PenetrationOutcome {
    double penetration = 0;
    FlaggedEventLog flagged;
    ObservedSeries scaled;
    std::vector<double> smoothed; // naive smoothed value per eval tick
    LabelSeries truth;
    std::vector<MethodOutcome> methods;

    const MethodOutcome& outcome(Method method) const;
};

/// Sampling, leave-one-out calibration, estimation and evaluation for one
/// penetration rate on an already simulated scenario. Each evaluated day
/// uses thresholds and a mean profile built from the other days only.
PenetrationOutcome run_penetration(const ValidatedScenario& scenario, const SimulationResult& sim,
                                   PenetrationRate p, std::span<const Method> methods,
                                   const ExperimentOptions& options = {});

/// Columns for figure export. With `offline_centered` the smoothed column
/// uses the centered (non-causal) window instead of the online one.
PlotColumns make_plot_columns(const ValidatedScenario& scenario, const SimulationResult& sim,
                              const PenetrationOutcome& outcome, Method method, const ExperimentOptions& options,
                              bool offline_centered = false);

} // namespace truckpark
