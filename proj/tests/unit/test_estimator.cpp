#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "truckpark/error.hpp"
#include "truckpark/estimator.hpp"

using namespace truckpark;

namespace {

using L = StateLabel;

// Two synthetic days: a smooth evening fill-up with some wobble.
std::vector<double> synthetic_days(std::size_t days, std::uint64_t seed, double shift_s = 0) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> wobble(0.0, 0.03);
    std::vector<double> v;
    for (std::size_t d = 0; d < days; ++d) {
        for (int k = 0; k < 288; ++k) {
            const double h = (k * 300.0 - shift_s) / 3600.0;
            const double base = 0.3 + 0.9 / (1 + std::exp(-(h - 18.0) * 1.5)) + 0.7 / (1 + std::exp((h - 6.0) * 1.5));
            v.push_back(std::max(0.0, base + wobble(gen)));
        }
    }
    return v;
}

LabelSeries truth_from(const std::vector<double>& values, const Thresholds& th) {
    LabelSeries s;
    s.step_s = 300;
    for (double v : values) s.labels.push_back(base_label(v, th));
    return s;
}

ObservedSeries observed_of(const std::vector<double>& values, std::int64_t step = 300) {
    ObservedSeries s;
    s.step_s = step;
    s.scaled_ratio = values;
    s.observed_count.assign(values.size(), 0);
    return s;
}

// Objective of one cell computed from scratch, without the calibrator.
double independent_objective(const std::vector<double>& est, const LabelSeries& truth, const Thresholds& th,
                             const CalibrationOptions& opt) {
    std::vector<L> labels;
    for (std::size_t i = 0; i < est.size(); ++i) {
        labels.push_back(i == 0 ? base_label(est[i], th) : label_point(est[i], th, opt.hysteresis_band, labels.back()));
    }
    LabelSeries e;
    e.step_s = truth.step_s;
    e.labels = labels;
    const MatchResult m = match_transitions(extract_transitions(truth), extract_transitions(e), opt.windows);
    double abs_sum = 0;
    for (const auto& r : m.matches) abs_sum += std::abs(static_cast<double>(r.delay_s));
    const double mean = m.matches.empty() ? 0.0 : abs_sum / static_cast<double>(m.matches.size()) / 60.0;
    return mean + opt.miss_penalty_min * static_cast<double>(m.misses.size() + m.false_alarms.size());
}

} // namespace

TEST_CASE("default threshold grid") {
    const ThresholdGrid g = ThresholdGrid::default_grid();
    CHECK(g.filled.size() == 9);
    CHECK(g.full.size() == 21);
    CHECK(g.filled.front() == 0.50);
    CHECK(g.filled.back() == 0.90);
    CHECK(g.full.front() == 0.85);
    CHECK(g.full.back() == 1.05);
    CHECK(std::find(g.filled.begin(), g.filled.end(), 0.75) != g.filled.end());
    CHECK(std::find(g.full.begin(), g.full.end(), 0.95) != g.full.end());
}

TEST_CASE("grid search self-consistency fixed point") {
    const auto est = synthetic_days(2, 1);
    const LabelSeries truth = truth_from(est, reference_thresholds());
    CalibrationOptions opt;
    opt.hysteresis_band = 0.0;
    CHECK(grid_search_thresholds(est, truth, ThresholdGrid::default_grid(), opt) == reference_thresholds());
}

TEST_CASE("single-cell grid returns that cell") {
    const auto est = synthetic_days(1, 2);
    const LabelSeries truth = truth_from(est, reference_thresholds());
    CHECK(grid_search_thresholds(est, truth, ThresholdGrid{{0.6}, {1.0}}) == Thresholds(0.6, 1.0));
}

TEST_CASE("empty grid after the ordering constraint") {
    const auto est = synthetic_days(1, 2);
    const LabelSeries truth = truth_from(est, reference_thresholds());
    CHECK_THROWS_AS(grid_search_thresholds(est, truth, ThresholdGrid{{0.9}, {0.85, 0.9}}), ConfigError);
}

TEST_CASE("3x3 grid search equals an independent exhaustive scorer") {
    const auto est = synthetic_days(2, 3, 1500);
    const LabelSeries truth = truth_from(synthetic_days(2, 4), reference_thresholds());
    const ThresholdGrid grid{{0.6, 0.7, 0.8}, {0.9, 1.0, 1.1}};
    const CalibrationOptions opt;
    double best = 1e300;
    std::optional<Thresholds> arg;
    for (double f : grid.filled) {
        for (double u : grid.full) {
            const double obj = independent_objective(est, truth, Thresholds(f, u), opt);
            if (obj < best) {
                best = obj;
                arg = Thresholds(f, u);
            }
        }
    }
    const ThresholdCalibrator cal(est, truth, grid, opt);
    for (std::size_t c = 0; c < cal.cells().size(); ++c) {
        const bool all[] = {true};
        CHECK(calibration_objective(cal.score(c, all), opt) ==
              doctest::Approx(independent_objective(est, truth, cal.cells()[c], opt)));
    }
    CHECK(cal.best_all() == *arg);
}

TEST_CASE("grid search output lies on the grid") {
    const ThresholdGrid grid = ThresholdGrid::default_grid();
    for (std::uint64_t seed = 10; seed < 16; ++seed) {
        const auto est = synthetic_days(1, seed, static_cast<double>(seed) * 300);
        const LabelSeries truth = truth_from(synthetic_days(1, seed + 100), reference_thresholds());
        const Thresholds th = grid_search_thresholds(est, truth, grid);
        CHECK(th.filled() < th.full());
        CHECK(std::find(grid.filled.begin(), grid.filled.end(), th.filled()) != grid.filled.end());
        CHECK(std::find(grid.full.begin(), grid.full.end(), th.full()) != grid.full.end());
    }
}

TEST_CASE("ties prefer the reference pair, then the smallest pair") {
    // Nothing ever crosses: every cell scores zero.
    const std::vector<double> flat(288, 0.1);
    const LabelSeries truth = truth_from(flat, reference_thresholds());
    CHECK(grid_search_thresholds(flat, truth) == reference_thresholds());
    CHECK(grid_search_thresholds(flat, truth, ThresholdGrid{{0.6, 0.7}, {0.9, 1.0}}) == Thresholds(0.6, 0.9));
}

TEST_CASE("leave-one-out uses only the other segments") {
    const auto est = synthetic_days(3, 5, 900);
    const LabelSeries truth = truth_from(synthetic_days(3, 6), reference_thresholds());
    const ThresholdCalibrator cal(est, truth, ThresholdGrid::default_grid(), {}, 288);
    CHECK(cal.segment_count() == 3);

    // Dropping the last day equals calibrating on the first two alone.
    const std::vector<double> head(est.begin(), est.begin() + 2 * 288);
    LabelSeries truth_head = truth;
    truth_head.labels.resize(2 * 288);
    const ThresholdCalibrator two(head, truth_head, ThresholdGrid::default_grid(), {}, 288);
    CHECK(cal.best_excluding(2) == two.best_all());

    const bool mask[] = {true, false, true};
    CHECK(cal.best_excluding(1) == cal.best(mask));
    CHECK_THROWS_AS(cal.best(std::span<const bool>(mask, 2)), InvariantError);
}

TEST_CASE("naive estimator examples") {
    const Thresholds th = reference_thresholds();
    SUBCASE("constant full lot") {
        const LabelSeries l = estimate_labels_naive(observed_of(std::vector<double>(600, 1.2), 60), th, {}, 300);
        CHECK(l.size() == 120);
        for (auto x : l.labels) CHECK(x == L::Full);
    }
    SUBCASE("no observations") {
        const LabelSeries l = estimate_labels_naive(observed_of(std::vector<double>(600, 0.0), 60), th, {}, 300);
        for (auto x : l.labels) CHECK(x == L::Empty);
    }
    SUBCASE("fill-up ramp is detected late by about half the window") {
        std::vector<double> v(1440);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(1.3, static_cast<double>(i) / 600.0);
        NaiveOptions opt;
        opt.hysteresis_band = 0.0;
        const LabelSeries l = estimate_labels_naive(observed_of(v, 60), th, opt, 300);
        const auto tr = extract_transitions(l);
        REQUIRE(tr.size() == 2);
        // True crossing of 0.95 at minute 570; a 30-minute mean lags ~15 minutes.
        CHECK(tr[1].to == L::Full);
        CHECK(tr[1].time_s >= 570 * 60);
        CHECK(tr[1].time_s <= (570 + 20) * 60);
    }
}

TEST_CASE("naive labels are causal") {
    const auto v = synthetic_days(2, 8);
    std::vector<double> minute;
    for (double x : v) minute.insert(minute.end(), 5, x);
    const Thresholds th = reference_thresholds();
    const LabelSeries full = estimate_labels_naive(observed_of(minute, 60), th, {}, 300);
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t cut = 1 + gen() % (minute.size() - 1);
        const std::vector<double> head(minute.begin(), minute.begin() + static_cast<std::ptrdiff_t>(cut));
        const LabelSeries part = estimate_labels_naive(observed_of(head, 60), th, {}, 300);
        for (std::size_t i = 0; i < part.size(); ++i) REQUIRE(part.labels[i] == full.labels[i]);
    }
}

TEST_CASE("threshold schedule switches at midnight and keeps its state") {
    const std::vector<double> v{0.8, 0.8, 0.8, 0.8};
    const std::vector<Thresholds> days{Thresholds(0.75, 0.95), Thresholds(0.85, 0.95)};
    // Day 1 raises the filled bound to 0.85; 0.8 is below it by more than the band.
    CHECK(label_with_schedule(v, days, 2, 0.02) ==
          std::vector<L>{L::SlightlyFilled, L::SlightlyFilled, L::Empty, L::Empty});
    // Within the band the previous label survives the switch.
    const std::vector<Thresholds> close{Thresholds(0.75, 0.95), Thresholds(0.81, 0.95)};
    CHECK(label_with_schedule(v, close, 2, 0.02) ==
          std::vector<L>{L::SlightlyFilled, L::SlightlyFilled, L::SlightlyFilled, L::SlightlyFilled});
    CHECK_THROWS_AS(label_with_schedule(v, std::span(days).first(1), 2, 0.02), InvariantError);
}

TEST_CASE("mean-day estimate of a day equal to the profile") {
    const auto day = synthetic_days(1, 9);
    DailyProfile p;
    p.values = day;
    MeandayOptions opt;
    opt.hysteresis_band = 0.0;
    const LabelSeries l = estimate_labels_meanday(p, observed_of(day), reference_thresholds(), opt, 300);
    CHECK(l.labels == truth_from(day, reference_thresholds()).labels);
}

TEST_CASE("mean-day estimate follows a shifted day") {
    DailyProfile p;
    p.values = synthetic_days(1, 10);
    std::vector<double> shifted(288);
    for (std::size_t k = 0; k < 288; ++k) shifted[k] = p.at(static_cast<double>(k) * 300.0 - 1800.0);
    MeandayOptions opt;
    opt.hysteresis_band = 0.0;
    // The default weights hold a clean 30 minute shift near the identity on
    // this day; a light regularizer lets the fit follow it.
    opt.lambda_beta_per_sample = 0.01 * 18.0 * 18.0;
    opt.lambda_tau_per_sample = 0.01;
    const auto est = extract_transitions(estimate_labels_meanday(p, observed_of(shifted), reference_thresholds(), opt, 300));
    const auto ref = extract_transitions(truth_from(p.values, reference_thresholds()));
    // The evening fill-up moves 30 minutes later.
    const auto find_up = [](const std::vector<Transition>& tr) {
        for (const auto& t : tr) {
            if (t.from == L::SlightlyFilled && t.to == L::Full && t.time_s >= 12 * 3600) return t.time_s;
        }
        return std::int64_t{-1};
    };
    REQUIRE(find_up(ref) > 0);
    CHECK(std::abs(find_up(est) - (find_up(ref) + 1800)) <= 300);
}

TEST_CASE("degenerate fit falls back to the naive value") {
    DailyProfile p;
    p.values.assign(288, 0.0);
    const auto obs = synthetic_days(1, 11);
    std::vector<double> fallback(obs.size(), 0.42);
    const DayCurve c = meanday_day_curve(p, obs, fallback, 300, {});
    for (std::size_t k = 0; k < c.fitted.size(); ++k) {
        REQUIRE(c.degenerate[k]);
        REQUIRE(c.fitted[k] == 0.42);
    }
}

TEST_CASE("mean-day labels are causal") {
    DailyProfile p;
    p.values = synthetic_days(1, 12);
    const auto obs = synthetic_days(2, 13, 1200);
    const MeandayOptions opt;
    const Thresholds th = reference_thresholds();
    const LabelSeries full = estimate_labels_meanday(p, observed_of(obs), th, opt, 300);
    for (std::size_t cut : {1u, 50u, 200u, 287u, 288u, 400u}) {
        const std::vector<double> head(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(cut));
        const LabelSeries part = estimate_labels_meanday(p, observed_of(head), th, opt, 300);
        REQUIRE(part.size() == cut);
        for (std::size_t i = 0; i < cut; ++i) REQUIRE(part.labels[i] == full.labels[i]);
    }
}
