#include <doctest.h>

#include <cmath>
#include <random>

#include "truckpark/error.hpp"
#include "truckpark/labeling.hpp"

using namespace truckpark;

namespace {

const Thresholds kRef = reference_thresholds();

ObservedSeries series_of(std::vector<double> values, std::int64_t step = 60) {
    ObservedSeries s;
    s.step_s = step;
    s.observed_count.assign(values.size(), 0);
    s.scaled_ratio = std::move(values);
    return s;
}

constexpr StateLabel kLabels[] = {StateLabel::Empty, StateLabel::SlightlyFilled, StateLabel::Full};

} // namespace

TEST_CASE("label tokens") {
    for (StateLabel l : kLabels) CHECK(parse_label(label_token(l)) == l);
    CHECK(std::string(label_display_name(StateLabel::SlightlyFilled)) == "slightly filled");
    CHECK_FALSE(parse_label("filled").has_value());
    CHECK(StateLabel::Empty < StateLabel::SlightlyFilled);
    CHECK(StateLabel::SlightlyFilled < StateLabel::Full);
}

TEST_CASE("threshold validation") {
    CHECK_THROWS_AS(Thresholds(0.0, 0.5), ConfigError);
    CHECK_THROWS_AS(Thresholds(0.8, 0.8), ConfigError);
    CHECK_THROWS_AS(Thresholds(0.9, 0.8), ConfigError);
    CHECK_THROWS_AS(Thresholds(0.9, 1.6), ConfigError);
    CHECK_NOTHROW(Thresholds(0.9, 1.5));
    CHECK(kRef.filled() == 0.75);
    CHECK(kRef.full() == 0.95);
}

TEST_CASE("label_point examples") {
    CHECK(label_point(0.80, kRef, 0.02, StateLabel::Empty) == StateLabel::SlightlyFilled);
    CHECK(label_point(0.0, kRef, 0.02, StateLabel::Full) == StateLabel::Empty);
    CHECK(label_point(0.955, kRef, 0.02, StateLabel::SlightlyFilled) == StateLabel::SlightlyFilled);
    CHECK(label_point(0.975, kRef, 0.02, StateLabel::SlightlyFilled) == StateLabel::Full);
    CHECK(label_point(0.94, kRef, 0.02, StateLabel::Full) == StateLabel::Full);
    CHECK(label_point(0.92, kRef, 0.02, StateLabel::Full) == StateLabel::SlightlyFilled);
    // A jump over both bands goes straight through.
    CHECK(label_point(1.2, kRef, 0.02, StateLabel::Empty) == StateLabel::Full);
    // Clears the filled band but not the full band.
    CHECK(label_point(0.96, kRef, 0.02, StateLabel::Empty) == StateLabel::SlightlyFilled);
    CHECK(label_point(0.74, kRef, 0.02, StateLabel::Full) == StateLabel::SlightlyFilled);
    CHECK(label_point(0.72, kRef, 0.02, StateLabel::Full) == StateLabel::Empty);
}

TEST_CASE("zero band ignores the previous label") {
    for (int i = 0; i <= 1600; ++i) {
        const double r = i / 1000.0;
        for (StateLabel prev : kLabels) REQUIRE(label_point(r, kRef, 0.0, prev) == base_label(r, kRef));
    }
    CHECK(base_label(0.75, kRef) == StateLabel::SlightlyFilled);
    CHECK(base_label(0.7499, kRef) == StateLabel::Empty);
    CHECK(base_label(0.95, kRef) == StateLabel::Full);
}

TEST_CASE("label_point is monotone in the ratio") {
    for (double band : {0.0, 0.01, 0.02, 0.1}) {
        for (StateLabel prev : kLabels) {
            StateLabel last = StateLabel::Empty;
            for (int i = 0; i <= 1600; ++i) {
                const StateLabel l = label_point(i / 1000.0, kRef, band, prev);
                REQUIRE(l >= last);
                last = l;
            }
        }
    }
}

TEST_CASE("scaling ratios and thresholds together keeps the labels") {
    // Power-of-two factors scale exactly; the band scales with the thresholds.
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> d(0.0, 1.4);
    std::vector<double> values(500);
    for (auto& v : values) v = d(gen);
    for (double c : {0.5, 0.25, 1.0}) {
        std::vector<double> scaled(values);
        for (auto& v : scaled) v *= c;
        const Thresholds th(0.75 * c, 0.95 * c);
        CHECK(label_online(scaled, th, 0.02 * c) == label_online(values, kRef, 0.02));
        CHECK(label_online(scaled, th, 0.0) == label_online(values, kRef, 0.0));
    }
}

TEST_CASE("online labeling starts from the base rule") {
    const std::vector<double> v{0.96, 0.94, 0.9, 0.7};
    const auto l = label_online(v, kRef, 0.02);
    CHECK(l == std::vector<StateLabel>{StateLabel::Full, StateLabel::Full, StateLabel::SlightlyFilled,
                                       StateLabel::Empty});
}

TEST_CASE("causal smoothing") {
    SUBCASE("constant series is unchanged") {
        const auto out = smooth_causal(series_of(std::vector<double>(50, 0.4)), 1800);
        for (double v : out.scaled_ratio) CHECK(v == doctest::Approx(0.4));
    }
    SUBCASE("unit step gives a ramp") {
        std::vector<double> v(20, 0.0);
        for (std::size_t i = 10; i < v.size(); ++i) v[i] = 1.0;
        const auto out = smooth_causal(series_of(v), 240);
        CHECK(out.scaled_ratio[9] == 0.0);
        CHECK(out.scaled_ratio[10] == doctest::Approx(0.25));
        CHECK(out.scaled_ratio[11] == doctest::Approx(0.5));
        CHECK(out.scaled_ratio[12] == doctest::Approx(0.75));
        CHECK(out.scaled_ratio[13] == 1.0);
    }
    SUBCASE("single-sample window is the identity") {
        const std::vector<double> v{0.1, 0.9, 0.3, 0.7};
        CHECK(smooth_causal(series_of(v), 60).scaled_ratio == v);
    }
    SUBCASE("window shorter than the step is rejected") {
        CHECK_THROWS_AS(smooth_causal(series_of({1.0}), 30), ConfigError);
    }
    SUBCASE("prefix of the output ignores later samples") {
        std::vector<double> v(40);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(static_cast<double>(i));
        const auto full = smooth_causal(series_of(v), 600).scaled_ratio;
        v.resize(25);
        const auto cut = smooth_causal(series_of(v), 600).scaled_ratio;
        for (std::size_t i = 0; i < cut.size(); ++i) REQUIRE(cut[i] == full[i]);
    }
}

TEST_CASE("centered smoothing looks both ways") {
    std::vector<double> v(9, 0.0);
    v[4] = 1.0;
    const auto out = smooth_centered(series_of(v), 180).scaled_ratio;
    CHECK(out[3] == doctest::Approx(1.0 / 3.0));
    CHECK(out[4] == doctest::Approx(1.0 / 3.0));
    CHECK(out[5] == doctest::Approx(1.0 / 3.0));
    CHECK(out[2] == 0.0);
}

TEST_CASE("tick sampling") {
    std::vector<double> v(12);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    CHECK(sample_at_ticks(series_of(v), 300) == std::vector<double>{0.0, 5.0, 10.0});
    CHECK_THROWS_AS(sample_at_ticks(series_of(v), 90), ConfigError);
}

TEST_CASE("ground truth of a triangle wave crosses at the analytic times") {
    // Counts rise 0 -> 120 over 120 minutes, then fall back; capacity 100.
    OccupancySeries occ;
    occ.step_s = 60;
    occ.green_capacity = 100;
    for (int i = 0; i < 240; ++i) {
        const int c = i <= 120 ? i : 240 - i;
        occ.count_total.push_back(c);
        occ.count_green.push_back(std::min(c, 100));
        occ.count_yellow.push_back(std::max(c - 100, 0));
        occ.count_red.push_back(0);
    }
    const LabelSeries truth = ground_truth_labels(occ, kRef, 60);
    CHECK(truth.step_s == 60);
    REQUIRE(truth.size() == 240);
    // Up-crossings at minutes 75 and 95; down-crossings at 146 (< 95) and 166 (< 75).
    CHECK(truth.labels[74] == StateLabel::Empty);
    CHECK(truth.labels[75] == StateLabel::SlightlyFilled);
    CHECK(truth.labels[94] == StateLabel::SlightlyFilled);
    CHECK(truth.labels[95] == StateLabel::Full);
    CHECK(truth.labels[145] == StateLabel::Full);
    CHECK(truth.labels[146] == StateLabel::SlightlyFilled);
    CHECK(truth.labels[165] == StateLabel::SlightlyFilled);
    CHECK(truth.labels[166] == StateLabel::Empty);

    const LabelSeries coarse = ground_truth_labels(occ, kRef, 300);
    CHECK(coarse.size() == 48);
    CHECK(coarse.labels[15] == StateLabel::SlightlyFilled); // minute 75
    CHECK(coarse.labels[19] == StateLabel::Full);           // minute 95
}

TEST_CASE("ground truth edge cases") {
    OccupancySeries occ;
    occ.green_capacity = 10;
    occ.count_total.assign(50, 0);
    occ.count_green = occ.count_yellow = occ.count_red = occ.count_total;
    for (auto l : ground_truth_labels(occ, kRef, 300).labels) CHECK(l == StateLabel::Empty);
    occ.count_total.assign(50, 10);
    for (auto l : ground_truth_labels(occ, kRef, 300).labels) CHECK(l == StateLabel::Full);
}
