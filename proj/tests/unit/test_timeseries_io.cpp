#include <doctest.h>

#include <functional>

#include "test_support.hpp"
#include "truckpark/error.hpp"
#include "truckpark/timeseries_io.hpp"

using namespace truckpark;

namespace {

const SimulationResult& shared_sim() {
    static const SimulationResult sim = simulate(validate_config(test::small_config(2, 3)));
    return sim;
}

std::string parse_error(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("metadata line") {
    FileHeader h{"labels", 1, "abc", {{"penetration", "0.100000"}}};
    CHECK(h.render() == "# truckpark labels v1 scenario=abc penetration=0.100000\n");
    const auto back = parse_file_header("# truckpark labels v1 scenario=abc penetration=0.100000");
    REQUIRE(back.has_value());
    CHECK(back->format_name == "labels");
    CHECK(back->format_version == 1);
    CHECK(back->scenario_fingerprint == "abc");
    CHECK(back->extra.at("penetration") == "0.100000");
    CHECK_FALSE(parse_file_header("# something else").has_value());
    CHECK_FALSE(parse_file_header("t_s,label").has_value());
}

TEST_CASE("ratio formatting") {
    CHECK(format_ratio(1.0) == "1.000000");
    CHECK(format_ratio(0.1234567) == "0.123457");
    CHECK(format_ratio(0.0) == "0.000000");
}

TEST_CASE("event log round trip") {
    const EventLog& log = shared_sim().log;
    const std::string text = format_event_log(log);
    CHECK(text.starts_with("# truckpark event_log v1 scenario=" + log.scenario_fingerprint + "\n"));
    CHECK(parse_event_log(text) == log);
    test::TempDir dir("events");
    write_event_log(dir.file("e.csv"), log);
    CHECK(read_event_log(dir.file("e.csv")) == log);
}

TEST_CASE("event log parse errors carry line numbers") {
    const std::string head = "truck_id,arrival_s,departure_s,zone\n";
    CHECK(parse_error([&] { parse_event_log(head + "0,10,20,blue\n"); }) == "line 2: unknown zone 'blue'");
    CHECK(parse_error([&] { parse_event_log(head + "0,10,20\n"); }) == "line 2: expected 4 fields, found 3");
    CHECK(parse_error([&] { parse_event_log(head + "0,10,x,green\n"); }) == "line 2: invalid departure_s 'x'");
    CHECK(parse_error([&] { parse_event_log(head + "0,20,10,green\n"); }) ==
          "line 2: truck_id 0 has departure_s <= arrival_s");
    CHECK(parse_error([&] { parse_event_log("# truckpark labels v1\n" + head); }) ==
          "line 1: expected format event_log, found labels");
    CHECK(parse_error([&] { parse_event_log("# truckpark event_log v2\n" + head); }) ==
          "line 1: unsupported event_log version 2 (expected 1)");
    CHECK(parse_error([&] { parse_event_log("id,a,d,z\n"); }).starts_with("line 1: expected header"));
    // Strict logs need dense ids in arrival order.
    CHECK_THROWS_AS(parse_event_log(head + "5,10,20,green\n"), ParseError);
    // Files without the metadata line are accepted.
    CHECK(parse_event_log(head + "0,10,20,green\n").events.size() == 1);
}

TEST_CASE("external import sorts and checks capacity") {
    const std::string head = "truck_id,arrival_s,departure_s,zone\n";
    const EventLog log = import_external_events_text(head + "17,500,900,green\n4,100,600,yellow\n", {1, 1, 0});
    REQUIRE(log.events.size() == 2);
    CHECK(log.events[0].truck_id == 4);
    CHECK(log.events[1].truck_id == 17);

    CHECK_THROWS_WITH_AS(import_external_events_text(head + "1,100,600,green\n2,100,700,green\n", {1, 0, 0}),
                         "capacity exceeded at t=100 s in zone green (2 > 1)", InvariantError);
    CHECK_THROWS_AS(import_external_events_text(head + "1,100,600,green\n1,200,700,green\n", {5, 0, 0}),
                    InvariantError);
}

TEST_CASE("flagged event log round trip") {
    const FlaggedEventLog f = assign_app_users(shared_sim().log, PenetrationRate(0.3), 2);
    const std::string text = format_flagged_event_log(f, 0.3);
    CHECK(text.find("penetration=0.300000") != std::string::npos);
    CHECK(parse_flagged_event_log(text) == f);
    CHECK_THROWS_AS(parse_flagged_event_log("truck_id,arrival_s,departure_s,zone,app_user\n0,1,2,green,2\n"),
                    ParseError);
}

TEST_CASE("occupancy round trip") {
    const OccupancySeries& occ = shared_sim().occupancy;
    const std::string text = format_occupancy(occ, "fp");
    CHECK(parse_occupancy(text) == occ);
    CHECK_THROWS_AS(parse_occupancy("t_s,count_green,count_yellow,count_red,count_total,ratio\n"), ParseError);
    const std::string bad = "# truckpark occupancy v1 green_capacity=10\n"
                            "t_s,count_green,count_yellow,count_red,count_total,ratio\n0,1,0,0,2,0.200000\n";
    CHECK(parse_error([&] { parse_occupancy(bad); }) == "line 3: count_total must equal the zone sum");
}

TEST_CASE("observed series round trip") {
    const FlaggedEventLog f = assign_app_users(shared_sim().log, PenetrationRate(0.5), 2);
    const ObservedSeries s =
        scale_series(observed_count_series(f, 0, 60, shared_sim().occupancy.size()), PenetrationRate(0.5), 10);
    const ObservedSeries back = parse_observed(format_observed(s, "fp", 0.5));
    CHECK(back.observed_count == s.observed_count);
    CHECK(back.step_s == 60);
    for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(back.scaled_ratio[i] == doctest::Approx(s.scaled_ratio[i]));
    ObservedSeries unscaled = s;
    unscaled.scaled_ratio.clear();
    CHECK_THROWS_AS(format_observed(unscaled, "fp", 0.5), InvariantError);
}

TEST_CASE("label file round trip and grid checks") {
    LabelSeries l;
    l.start_s = 600;
    l.step_s = 300;
    l.labels = {StateLabel::Empty, StateLabel::Full, StateLabel::SlightlyFilled};
    const std::string text = format_labels(l, "fp");
    CHECK(text == "# truckpark labels v1 scenario=fp\nt_s,label\n600,empty\n900,full\n1200,slightly_filled\n");
    CHECK(parse_labels(text) == l);
    CHECK(parse_error([&] { parse_labels("t_s,label\n0,empty\n300,empty\n900,full\n"); }) ==
          "line 4: irregular time grid");
    CHECK(parse_error([&] { parse_labels("t_s,label\n0,filled\n"); }) == "line 2: unknown label 'filled'");
}

TEST_CASE("profile round trip") {
    DailyProfile p;
    for (int b = 0; b < 288; ++b) p.values.push_back(b / 288.0);
    const DailyProfile back = parse_profile(format_profile(p, "fp"));
    CHECK(back.bin_s == 300);
    REQUIRE(back.values.size() == 288);
    for (std::size_t b = 0; b < 288; ++b) REQUIRE(back.values[b] == doctest::Approx(p.values[b]).epsilon(1e-6));
    CHECK_THROWS_AS(parse_profile("bin_start_s,mean_ratio\n0,0.5\n300,0.5\n"), ParseError);
}

TEST_CASE("plot bundle columns must align") {
    PlotColumns c;
    c.true_ratio = {0.5, 0.9};
    c.scaled_ratio = {0.4, 1.0};
    c.smoothed_ratio = {0.4, 0.7};
    c.fitted_ratio = {0.5, 0.8};
    c.true_labels = {StateLabel::Empty, StateLabel::SlightlyFilled};
    c.estimated_labels = {StateLabel::Empty, StateLabel::SlightlyFilled};
    const std::string text = format_plot_data(c, "fp");
    CHECK(text ==
          "# truckpark plot_data v1 scenario=fp\n"
          "t_s,true_ratio,scaled_ratio,smoothed_ratio,fitted_ratio,true_label,estimated_label\n"
          "0,0.500000,0.400000,0.400000,0.500000,empty,empty\n"
          "300,0.900000,1.000000,0.700000,0.800000,slightly_filled,slightly_filled\n");
    c.fitted_ratio.pop_back();
    CHECK_THROWS_AS(format_plot_data(c, "fp"), InvariantError);
}

TEST_CASE("file helpers") {
    test::TempDir dir("files");
    write_text_file(dir.file("a.txt"), "hello\n");
    CHECK(read_text_file(dir.file("a.txt")) == "hello\n");
    CHECK_THROWS_AS(read_text_file(dir.file("missing.txt")), Error);
}
