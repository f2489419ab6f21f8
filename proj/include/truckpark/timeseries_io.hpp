#pragma once

// Text formats for every artifact. All files are comma-separated,
// newline-terminated and header-first, preceded by one metadata line
//
//   # truckpark <format_name> v<version> [key=value ...]
//
// Writers are deterministic: ratios carry exactly six fractional digits and
// no creation timestamps are stored. Readers accept files without the
// metadata line (external data) but reject a wrong format or version.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "truckpark/labeling.hpp"
#include "truckpark/observation.hpp"
#include "truckpark/sim_engine.hpp"
#include "truckpark/warp.hpp"

namespace truckpark {

inline constexpr int kFormatVersion = 1;

struct FileHeader {
    std::string format_name;
    int format_version = kFormatVersion;
    std::string scenario_fingerprint; // empty when unknown
    std::map<std::string, std::string> extra;

    std::string render() const;
};

/// Parses a metadata line. Returns nullopt if `line` is not one.
std::optional<FileHeader> parse_file_header(const std::string& line);

std::string format_ratio(double v); // fixed, 6 fractional digits

// Event logs: truck_id,arrival_s,departure_s,zone
std::string format_event_log(const EventLog& log);
EventLog parse_event_log(const std::string& text);
void write_event_log(const std::string& path, const EventLog& log);
EventLog read_event_log(const std::string& path);

/// Reads an event log of any origin: rows may be unsorted and ids need only
/// be unique. Output is sorted by (arrival_s, truck_id) and replayed against
/// the capacities; violations are reported, not repaired.
EventLog import_external_events(const std::string& path, const ZoneCapacities& capacities);
EventLog import_external_events_text(const std::string& text, const ZoneCapacities& capacities);

// Flagged event logs: event-log columns plus app_user (0|1)
std::string format_flagged_event_log(const FlaggedEventLog& log, double penetration);
FlaggedEventLog parse_flagged_event_log(const std::string& text);

// Occupancy: t_s,count_green,count_yellow,count_red,count_total,ratio
std::string format_occupancy(const OccupancySeries& series, const std::string& fingerprint);
OccupancySeries parse_occupancy(const std::string& text);

// Observed: t_s,observed_count,scaled_ratio
std::string format_observed(const ObservedSeries& series, const std::string& fingerprint, double penetration);
ObservedSeries parse_observed(const std::string& text);

// Labels: t_s,label with label in empty|slightly_filled|full
std::string format_labels(const LabelSeries& labels, const std::string& fingerprint);
LabelSeries parse_labels(const std::string& text);
LabelSeries read_labels(const std::string& path);

// Profiles: bin_start_s,mean_ratio
std::string format_profile(const DailyProfile& profile, const std::string& fingerprint);
DailyProfile parse_profile(const std::string& text);

/// Columns of a plot bundle, all on the eval-tick grid.
struct PlotColumns {
    std::int64_t start_s = 0;
    std::int64_t step_s = 300;
    std::vector<double> true_ratio;
    std::vector<double> scaled_ratio;
    std::vector<double> smoothed_ratio;
    std::vector<double> fitted_ratio;
    std::vector<StateLabel> true_labels;
    std::vector<StateLabel> estimated_labels;
};

/// t_s plus six aligned data columns:
/// true_ratio,scaled_ratio,smoothed_ratio,fitted_ratio,true_label,estimated_label.
/// Throws InvariantError if the columns differ in length.
std::string format_plot_data(const PlotColumns& columns, const std::string& fingerprint);
void export_plot_data(const std::string& path, const PlotColumns& columns, const std::string& fingerprint);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace truckpark
