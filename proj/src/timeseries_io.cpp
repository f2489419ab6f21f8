#include "truckpark/timeseries_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "truckpark/error.hpp"

namespace truckpark {

// ---------------------------------------------------------------------------
// Headers and primitives

std::string FileHeader::render() const {
    std::string out = "# truckpark " + format_name + " v" + std::to_string(format_version);
    if (!scenario_fingerprint.empty()) out += " scenario=" + scenario_fingerprint;
    for (const auto& [k, v] : extra) out += " " + k + "=" + v;
    return out + "\n";
}

std::optional<FileHeader> parse_file_header(const std::string& line) {
    std::istringstream in(line);
    std::string hash, tool, name, version;
    if (!(in >> hash >> tool >> name >> version) || hash != "#" || tool != "truckpark" || version.size() < 2 ||
        version[0] != 'v') {
        return std::nullopt;
    }
    FileHeader h;
    h.format_name = name;
    const auto [ptr, ec] = std::from_chars(version.data() + 1, version.data() + version.size(), h.format_version);
    if (ec != std::errc() || ptr != version.data() + version.size()) return std::nullopt;
    std::string kv;
    while (in >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if (key == "scenario") {
            h.scenario_fingerprint = value;
        } else {
            h.extra[key] = value;
        }
    }
    return h;
}

std::string format_ratio(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

namespace {

struct Line {
    std::size_t number;
    std::string text;
};

/// Splits text into lines, checks the optional metadata line and the column
/// header, and returns the data rows.
struct Table {
    std::optional<FileHeader> header;
    std::vector<Line> rows;
};

Table split_table(const std::string& text, const std::string& format_name, const std::string& column_header) {
    Table table;
    std::size_t number = 0;
    std::size_t pos = 0;
    bool seen_columns = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (number == 1 && line.starts_with("#")) {
            table.header = parse_file_header(line);
            if (!table.header) throw ParseError("line 1: malformed metadata line");
            if (table.header->format_name != format_name) {
                throw ParseError("line 1: expected format " + format_name + ", found " + table.header->format_name);
            }
            if (table.header->format_version != kFormatVersion) {
                throw ParseError("line 1: unsupported " + format_name + " version " +
                                 std::to_string(table.header->format_version) + " (expected " +
                                 std::to_string(kFormatVersion) + ")");
            }
            continue;
        }
        if (!seen_columns) {
            if (line != column_header) {
                throw ParseError("line " + std::to_string(number) + ": expected header '" + column_header + "'");
            }
            seen_columns = true;
            continue;
        }
        if (line.empty()) {
            if (pos >= text.size()) break;
            throw ParseError("line " + std::to_string(number) + ": empty row");
        }
        table.rows.push_back({number, std::move(line)});
    }
    if (!seen_columns) throw ParseError("missing header '" + column_header + "'");
    return table;
}

std::vector<std::string> split_fields(const Line& line, std::size_t expected) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.text.find(',', start);
        fields.push_back(line.text.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (fields.size() != expected) {
        throw ParseError("line " + std::to_string(line.number) + ": expected " + std::to_string(expected) +
                         " fields, found " + std::to_string(fields.size()));
    }
    return fields;
}

template <class Int>
Int parse_int(const std::string& s, const Line& line, const char* what) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line.number) + ": invalid " + what + " '" + s + "'");
    }
    return v;
}

double parse_double(const std::string& s, const Line& line, const char* what) {
    double v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line.number) + ": invalid " + what + " '" + s + "'");
    }
    return v;
}

ZoneId parse_zone(const std::string& s, const Line& line) {
    if (s == "green") return ZoneId::Green;
    if (s == "yellow") return ZoneId::Yellow;
    if (s == "red") return ZoneId::Red;
    throw ParseError("line " + std::to_string(line.number) + ": unknown zone '" + s + "'");
}

ParkingEvent parse_event_fields(const std::vector<std::string>& f, const Line& line) {
    ParkingEvent e;
    e.truck_id = parse_int<std::int64_t>(f[0], line, "truck_id");
    e.arrival_s = parse_int<std::int64_t>(f[1], line, "arrival_s");
    e.departure_s = parse_int<std::int64_t>(f[2], line, "departure_s");
    e.zone = parse_zone(f[3], line);
    if (e.arrival_s < 0) {
        throw ParseError("line " + std::to_string(line.number) + ": truck_id " + std::to_string(e.truck_id) +
                         " has negative arrival_s");
    }
    if (e.departure_s <= e.arrival_s) {
        throw ParseError("line " + std::to_string(line.number) + ": truck_id " + std::to_string(e.truck_id) +
                         " has departure_s <= arrival_s");
    }
    return e;
}

void append_event(std::string& out, const ParkingEvent& e) {
    out += std::to_string(e.truck_id);
    out += ',';
    out += std::to_string(e.arrival_s);
    out += ',';
    out += std::to_string(e.departure_s);
    out += ',';
    out += zone_name(e.zone);
}

/// Checks that consecutive row times form a regular grid.
void check_regular(std::span<const std::int64_t> times, std::span<const Line> rows, std::int64_t& start,
                   std::int64_t& step, std::int64_t default_step) {
    start = times.empty() ? 0 : times[0];
    step = times.size() >= 2 ? times[1] - times[0] : default_step;
    if (times.size() >= 2 && step <= 0) throw ParseError("line " + std::to_string(rows[1].number) + ": time must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (times[i] - times[i - 1] != step) {
            throw ParseError("line " + std::to_string(rows[i].number) + ": irregular time grid");
        }
    }
}

const char* kEventColumns = "truck_id,arrival_s,departure_s,zone";

} // namespace

// ---------------------------------------------------------------------------
// Event logs

std::string format_event_log(const EventLog& log) {
    std::string out = FileHeader{"event_log", kFormatVersion, log.scenario_fingerprint, {}}.render();
    out += kEventColumns;
    out += '\n';
    for (const auto& e : log.events) {
        append_event(out, e);
        out += '\n';
    }
    return out;
}

EventLog parse_event_log(const std::string& text) {
    const Table table = split_table(text, "event_log", kEventColumns);
    EventLog log;
    if (table.header) log.scenario_fingerprint = table.header->scenario_fingerprint;
    for (const auto& row : table.rows) log.events.push_back(parse_event_fields(split_fields(row, 4), row));
    try {
        check_event_log(log.events, true);
    } catch (const InvariantError& e) {
        throw ParseError(std::string("event log: ") + e.what());
    }
    return log;
}

void write_event_log(const std::string& path, const EventLog& log) { write_text_file(path, format_event_log(log)); }

EventLog read_event_log(const std::string& path) { return parse_event_log(read_text_file(path)); }

EventLog import_external_events_text(const std::string& text, const ZoneCapacities& capacities) {
    const Table table = split_table(text, "event_log", kEventColumns);
    EventLog log;
    if (table.header) log.scenario_fingerprint = table.header->scenario_fingerprint;
    for (const auto& row : table.rows) log.events.push_back(parse_event_fields(split_fields(row, 4), row));
    std::stable_sort(log.events.begin(), log.events.end(), [](const ParkingEvent& a, const ParkingEvent& b) {
        return a.arrival_s != b.arrival_s ? a.arrival_s < b.arrival_s : a.truck_id < b.truck_id;
    });
    check_event_log(log.events, false);
    check_capacity(log.events, capacities);
    return log;
}

EventLog import_external_events(const std::string& path, const ZoneCapacities& capacities) {
    return import_external_events_text(read_text_file(path), capacities);
}

// ---------------------------------------------------------------------------
// Flagged event logs

std::string format_flagged_event_log(const FlaggedEventLog& log, double penetration) {
    std::string out = FileHeader{"flagged_event_log",
                                 kFormatVersion,
                                 log.log.scenario_fingerprint,
                                 {{"penetration", format_ratio(penetration)}}}
                          .render();
    out += std::string(kEventColumns) + ",app_user\n";
    for (std::size_t i = 0; i < log.log.events.size(); ++i) {
        append_event(out, log.log.events[i]);
        out += log.app_user[i] ? ",1\n" : ",0\n";
    }
    return out;
}

FlaggedEventLog parse_flagged_event_log(const std::string& text) {
    const Table table = split_table(text, "flagged_event_log", std::string(kEventColumns) + ",app_user");
    FlaggedEventLog out;
    if (table.header) out.log.scenario_fingerprint = table.header->scenario_fingerprint;
    for (const auto& row : table.rows) {
        const auto f = split_fields(row, 5);
        out.log.events.push_back(parse_event_fields(f, row));
        if (f[4] != "0" && f[4] != "1") {
            throw ParseError("line " + std::to_string(row.number) + ": app_user must be 0 or 1");
        }
        out.app_user.push_back(f[4] == "1");
    }
    try {
        check_event_log(out.log.events, true);
    } catch (const InvariantError& e) {
        throw ParseError(std::string("flagged event log: ") + e.what());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Series

std::string format_occupancy(const OccupancySeries& s, const std::string& fingerprint) {
    std::string out = FileHeader{"occupancy",
                                 kFormatVersion,
                                 fingerprint,
                                 {{"green_capacity", std::to_string(s.green_capacity)}}}
                          .render();
    out += "t_s,count_green,count_yellow,count_red,count_total,ratio\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += std::to_string(s.time_at(i)) + ',' + std::to_string(s.count_green[i]) + ',' +
               std::to_string(s.count_yellow[i]) + ',' + std::to_string(s.count_red[i]) + ',' +
               std::to_string(s.count_total[i]) + ',' + format_ratio(s.ratio(i)) + '\n';
    }
    return out;
}

OccupancySeries parse_occupancy(const std::string& text) {
    const Table table = split_table(text, "occupancy", "t_s,count_green,count_yellow,count_red,count_total,ratio");
    OccupancySeries s;
    if (!table.header || !table.header->extra.contains("green_capacity")) {
        throw ParseError("occupancy file needs a metadata line with green_capacity");
    }
    s.green_capacity = parse_int<std::int64_t>(table.header->extra.at("green_capacity"), {1, ""}, "green_capacity");
    if (s.green_capacity < 1) throw ParseError("line 1: green_capacity must be >= 1");
    std::vector<std::int64_t> times;
    for (const auto& row : table.rows) {
        const auto f = split_fields(row, 6);
        times.push_back(parse_int<std::int64_t>(f[0], row, "t_s"));
        s.count_green.push_back(parse_int<std::int32_t>(f[1], row, "count_green"));
        s.count_yellow.push_back(parse_int<std::int32_t>(f[2], row, "count_yellow"));
        s.count_red.push_back(parse_int<std::int32_t>(f[3], row, "count_red"));
        s.count_total.push_back(parse_int<std::int32_t>(f[4], row, "count_total"));
        if (s.count_green.back() < 0 || s.count_yellow.back() < 0 || s.count_red.back() < 0) {
            throw ParseError("line " + std::to_string(row.number) + ": counts must be >= 0");
        }
        if (s.count_total.back() != s.count_green.back() + s.count_yellow.back() + s.count_red.back()) {
            throw ParseError("line " + std::to_string(row.number) + ": count_total must equal the zone sum");
        }
        if (format_ratio(s.ratio(s.size() - 1)) != f[5]) {
            throw ParseError("line " + std::to_string(row.number) + ": ratio does not match count_total");
        }
    }
    check_regular(times, table.rows, s.start_s, s.step_s, 60);
    return s;
}

std::string format_observed(const ObservedSeries& s, const std::string& fingerprint, double penetration) {
    if (s.scaled_ratio.size() != s.observed_count.size()) throw InvariantError("observed series is not scaled");
    std::string out = FileHeader{"observed", kFormatVersion, fingerprint, {{"penetration", format_ratio(penetration)}}}
                          .render();
    out += "t_s,observed_count,scaled_ratio\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += std::to_string(s.time_at(i)) + ',' + std::to_string(s.observed_count[i]) + ',' +
               format_ratio(s.scaled_ratio[i]) + '\n';
    }
    return out;
}

ObservedSeries parse_observed(const std::string& text) {
    const Table table = split_table(text, "observed", "t_s,observed_count,scaled_ratio");
    ObservedSeries s;
    std::vector<std::int64_t> times;
    for (const auto& row : table.rows) {
        const auto f = split_fields(row, 3);
        times.push_back(parse_int<std::int64_t>(f[0], row, "t_s"));
        s.observed_count.push_back(parse_int<std::int32_t>(f[1], row, "observed_count"));
        s.scaled_ratio.push_back(parse_double(f[2], row, "scaled_ratio"));
        if (s.observed_count.back() < 0 || s.scaled_ratio.back() < 0) {
            throw ParseError("line " + std::to_string(row.number) + ": values must be >= 0");
        }
    }
    check_regular(times, table.rows, s.start_s, s.step_s, 60);
    return s;
}

std::string format_labels(const LabelSeries& labels, const std::string& fingerprint) {
    std::string out = FileHeader{"labels", kFormatVersion, fingerprint, {}}.render();
    out += "t_s,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += std::to_string(labels.time_at(i)) + ',' + label_token(labels.labels[i]) + '\n';
    }
    return out;
}

LabelSeries parse_labels(const std::string& text) {
    const Table table = split_table(text, "labels", "t_s,label");
    LabelSeries s;
    std::vector<std::int64_t> times;
    for (const auto& row : table.rows) {
        const auto f = split_fields(row, 2);
        times.push_back(parse_int<std::int64_t>(f[0], row, "t_s"));
        const auto label = parse_label(f[1]);
        if (!label) throw ParseError("line " + std::to_string(row.number) + ": unknown label '" + f[1] + "'");
        s.labels.push_back(*label);
    }
    check_regular(times, table.rows, s.start_s, s.step_s, 300);
    return s;
}

LabelSeries read_labels(const std::string& path) { return parse_labels(read_text_file(path)); }

std::string format_profile(const DailyProfile& profile, const std::string& fingerprint) {
    std::string out = FileHeader{"profile", kFormatVersion, fingerprint, {}}.render();
    out += "bin_start_s,mean_ratio\n";
    for (std::size_t b = 0; b < profile.values.size(); ++b) {
        out += std::to_string(static_cast<std::int64_t>(b) * profile.bin_s) + ',' + format_ratio(profile.values[b]) +
               '\n';
    }
    return out;
}

DailyProfile parse_profile(const std::string& text) {
    const Table table = split_table(text, "profile", "bin_start_s,mean_ratio");
    DailyProfile p;
    std::vector<std::int64_t> times;
    for (const auto& row : table.rows) {
        const auto f = split_fields(row, 2);
        times.push_back(parse_int<std::int64_t>(f[0], row, "bin_start_s"));
        p.values.push_back(parse_double(f[1], row, "mean_ratio"));
    }
    std::int64_t start = 0;
    check_regular(times, table.rows, start, p.bin_s, 300);
    if (start != 0) throw ParseError("profile must start at bin 0");
    try {
        check_profile(p);
    } catch (const InvariantError& e) {
        throw ParseError(std::string("profile: ") + e.what());
    }
    return p;
}

// ---------------------------------------------------------------------------
// Plot bundle

std::string format_plot_data(const PlotColumns& c, const std::string& fingerprint) {
    const std::size_t n = c.true_ratio.size();
    if (c.scaled_ratio.size() != n || c.smoothed_ratio.size() != n || c.fitted_ratio.size() != n ||
        c.true_labels.size() != n || c.estimated_labels.size() != n) {
        throw InvariantError("plot columns are not aligned on one grid");
    }
    std::string out = FileHeader{"plot_data", kFormatVersion, fingerprint, {}}.render();
    out += "t_s,true_ratio,scaled_ratio,smoothed_ratio,fitted_ratio,true_label,estimated_label\n";
    for (std::size_t i = 0; i < n; ++i) {
        out += std::to_string(c.start_s + static_cast<std::int64_t>(i) * c.step_s) + ',' +
               format_ratio(c.true_ratio[i]) + ',' + format_ratio(c.scaled_ratio[i]) + ',' +
               format_ratio(c.smoothed_ratio[i]) + ',' + format_ratio(c.fitted_ratio[i]) + ',' +
               label_token(c.true_labels[i]) + ',' + label_token(c.estimated_labels[i]) + '\n';
    }
    return out;
}

void export_plot_data(const std::string& path, const PlotColumns& columns, const std::string& fingerprint) {
    write_text_file(path, format_plot_data(columns, fingerprint));
}

// ---------------------------------------------------------------------------

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed for " + path);
}

} // namespace truckpark
