#include "truckpark/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "truckpark/digest.hpp"
#include "truckpark/error.hpp"
#include "truckpark/pipeline.hpp"
#include "truckpark/timeseries_io.hpp"

namespace truckpark {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Output directory of one run. Every artifact goes through `write` so the
/// manifest can list its checksum.
class RunDirectory {
public:
    RunDirectory(fs::path root, bool overwrite) : root_(std::move(root)) {
        if (fs::exists(root_)) {
            if (!fs::is_directory(root_)) throw Error(root_.string() + " exists and is not a directory");
            if (!fs::is_empty(root_)) {
                if (!overwrite) throw Error(root_.string() + " is not empty (pass --overwrite to replace it)");
                for (const auto& entry : fs::directory_iterator(root_)) fs::remove_all(entry.path());
            }
        } else {
            fs::create_directories(root_);
        }
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path path = root_ / name;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        write_text_file(path.string(), content);
        checksums_[name] = sha256_hex(content);
    }

    const std::map<std::string, std::string>& checksums() const { return checksums_; }
    const fs::path& root() const { return root_; }

private:
    fs::path root_;
    std::map<std::string, std::string> checksums_;
};

struct ManifestInfo {
    std::vector<std::string> command_line;
    std::string fingerprint;
    std::optional<std::uint64_t> master_seed;
    std::vector<double> penetrations;
};

void write_manifest(RunDirectory& dir, const ManifestInfo& info, const std::string& error) {
    json doc;
    doc["format"] = "truckpark.manifest";
    doc["format_version"] = kFormatVersion;
    doc["tool"] = "truckpark";
    doc["tool_version"] = kToolVersion;
    doc["command_line"] = info.command_line;
    doc["config_fingerprint"] = info.fingerprint;
    doc["master_seed"] = info.master_seed ? json(*info.master_seed) : json(nullptr);
    doc["penetrations"] = info.penetrations;
    doc["status"] = error.empty() ? "ok" : "failed";
    if (!error.empty()) doc["error"] = error;
    doc["artifacts"] = dir.checksums();
    write_text_file((dir.root() / "manifest.json").string(), doc.dump(2) + "\n");
}

std::string penetration_tag(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%.4f", p);
    return buf;
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<double> penetrations;
    std::string method = "both";
    bool overwrite = false;
    std::string events_path;
    bool recalibrate_meanday = false;
    std::string format = "text";
};

ValidatedScenario load_scenario(const CommonArgs& a) {
    ScenarioConfig cfg = load_config(a.config_path);
    if (a.seed) cfg.master_seed = *a.seed;
    return validate_config(cfg);
}

std::vector<Method> selected_methods(const std::string& name) {
    if (name == "both") return {Method::Naive, Method::Meanday};
    const auto m = parse_method(name);
    if (!m) throw ConfigError("--method must be naive, meanday or both");
    return {*m};
}

std::vector<PenetrationRate> selected_penetrations(const std::vector<double>& ps) {
    std::vector<PenetrationRate> out;
    if (ps.empty()) return {PenetrationRate(0.1), PenetrationRate(0.2)};
    for (double p : ps) out.emplace_back(p);
    return out;
}

/// Simulates, or imports --events against the scenario's capacities.
SimulationResult obtain_events(const ValidatedScenario& scenario, const CommonArgs& a) {
    if (a.events_path.empty()) return simulate(scenario);
    SimulationResult sim;
    sim.log = import_external_events(a.events_path, scenario.capacities());
    sim.log.scenario_fingerprint = scenario.fingerprint();
    for (const auto& e : sim.log.events) {
        if (e.arrival_s >= scenario.horizon_s()) {
            throw InvariantError("truck_id " + std::to_string(e.truck_id) + " arrives after the scenario horizon");
        }
    }
    sim.occupancy = occupancy_from_events(sim.log, scenario);
    sim.arrivals = static_cast<std::int64_t>(sim.log.events.size());
    return sim;
}

std::string config_document(const ValidatedScenario& s) { return config_to_json(s.config()).dump(2) + "\n"; }

ExperimentOptions experiment_options(const CommonArgs& a) {
    ExperimentOptions o;
    o.recalibrate_meanday = a.recalibrate_meanday;
    return o;
}

json thresholds_document(const MethodOutcome& m) {
    json arr = json::array();
    for (std::size_t d = 0; d < m.thresholds_per_day.size(); ++d) {
        arr.push_back({{"day", d}, {"theta_filled", m.thresholds_per_day[d].filled()},
                       {"theta_full", m.thresholds_per_day[d].full()}});
    }
    return arr;
}

ResultsMeta results_meta(const ValidatedScenario& s, double p, const MethodOutcome& m) {
    ResultsMeta meta;
    meta.scenario_fingerprint = s.fingerprint();
    meta.penetration = p;
    meta.method = method_name(m.method);
    for (const auto& th : m.thresholds_per_day) meta.thresholds.emplace_back(th.filled(), th.full());
    return meta;
}

std::string table_caption(double p, Method method) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "Delay of state estimation (%s), with penetration rate of %g%%.",
                  method_name(method), p * 100.0);
    return buf;
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns normally or throws; the caller handles the
// manifest and the exit status.

void cmd_simulate(const CommonArgs& a, RunDirectory& dir, ManifestInfo& info, std::ostream& out) {
    const ValidatedScenario scenario = load_scenario(a);
    info.fingerprint = scenario.fingerprint();
    info.master_seed = scenario.config().master_seed;
    const SimulationResult sim = simulate(scenario);
    dir.write("config.json", config_document(scenario));
    dir.write("events.csv", format_event_log(sim.log));
    dir.write("occupancy.csv", format_occupancy(sim.occupancy, scenario.fingerprint()));
    out << "simulated " << sim.log.events.size() << " parked trucks (" << sim.rejected << " rejected of "
        << sim.arrivals << " arrivals) over " << scenario.config().horizon_days << " days\n";
}

void cmd_observe(const CommonArgs& a, RunDirectory& dir, ManifestInfo& info, std::ostream& out) {
    const ValidatedScenario scenario = load_scenario(a);
    info.fingerprint = scenario.fingerprint();
    info.master_seed = scenario.config().master_seed;
    const auto& cfg = scenario.config();
    const SimulationResult sim = obtain_events(scenario, a);
    dir.write("config.json", config_document(scenario));
    dir.write("events.csv", format_event_log(sim.log));
    for (const PenetrationRate p : selected_penetrations(a.penetrations)) {
        info.penetrations.push_back(p.value());
        const auto flagged = assign_app_users(sim.log, p, derive_stream_seed(cfg.master_seed, Stream::AppUsers));
        const auto scaled = scale_series(observed_count_series(flagged, 0, cfg.grid_step_s, sim.occupancy.size()), p,
                                         cfg.capacities.green);
        const std::string tag = penetration_tag(p.value());
        dir.write("flagged_" + tag + ".csv", format_flagged_event_log(flagged, p.value()));
        dir.write("observed_" + tag + ".csv", format_observed(scaled, scenario.fingerprint(), p.value()));
        const auto users = std::count(flagged.app_user.begin(), flagged.app_user.end(), true);
        out << tag << ": " << users << " of " << flagged.app_user.size() << " trucks use the app\n";
    }
}

void cmd_estimate(const CommonArgs& a, RunDirectory& dir, ManifestInfo& info, std::ostream& out) {
    const ValidatedScenario scenario = load_scenario(a);
    info.fingerprint = scenario.fingerprint();
    info.master_seed = scenario.config().master_seed;
    const SimulationResult sim = obtain_events(scenario, a);
    const auto methods = selected_methods(a.method);
    const ExperimentOptions options = experiment_options(a);
    dir.write("config.json", config_document(scenario));
    for (const PenetrationRate p : selected_penetrations(a.penetrations)) {
        info.penetrations.push_back(p.value());
        const PenetrationOutcome outcome = run_penetration(scenario, sim, p, methods, options);
        const std::string tag = penetration_tag(p.value());
        dir.write("truth_labels_" + tag + ".csv", format_labels(outcome.truth, scenario.fingerprint()));
        for (const auto& m : outcome.methods) {
            const std::string stem = std::string(method_name(m.method)) + "_" + tag;
            dir.write("labels_" + stem + ".csv", format_labels(m.labels, scenario.fingerprint()));
            dir.write("thresholds_" + stem + ".json", thresholds_document(m).dump(2) + "\n");
            out << stem << ": " << m.labels.size() << " labels\n";
        }
        std::set<std::int64_t> all_days;
        for (std::int64_t d = 0; d < scenario.config().horizon_days; ++d) all_days.insert(d);
        dir.write("profile_" + tag + ".csv",
                  format_profile(daily_mean_profile(outcome.scaled, all_days, scenario.config().eval_step_s),
                                 scenario.fingerprint()));
    }
}

void cmd_run_all(const CommonArgs& a, RunDirectory& dir, ManifestInfo& info, std::ostream& out) {
    const ValidatedScenario scenario = load_scenario(a);
    info.fingerprint = scenario.fingerprint();
    info.master_seed = scenario.config().master_seed;
    const SimulationResult sim = obtain_events(scenario, a);
    const auto methods = selected_methods(a.method);
    const ExperimentOptions options = experiment_options(a);

    dir.write("config.json", config_document(scenario));
    dir.write("events.csv", format_event_log(sim.log));
    dir.write("occupancy.csv", format_occupancy(sim.occupancy, scenario.fingerprint()));

    json summary = json::array();
    std::string rendered;
    for (const PenetrationRate p : selected_penetrations(a.penetrations)) {
        info.penetrations.push_back(p.value());
        const PenetrationOutcome outcome = run_penetration(scenario, sim, p, methods, options);
        const std::string tag = penetration_tag(p.value());
        dir.write("flagged_" + tag + ".csv", format_flagged_event_log(outcome.flagged, p.value()));
        dir.write("observed_" + tag + ".csv", format_observed(outcome.scaled, scenario.fingerprint(), p.value()));
        dir.write("truth_labels_" + tag + ".csv", format_labels(outcome.truth, scenario.fingerprint()));
        for (const auto& m : outcome.methods) {
            const std::string stem = std::string(method_name(m.method)) + "_" + tag;
            dir.write("labels_" + stem + ".csv", format_labels(m.labels, scenario.fingerprint()));
            const json results = results_document(results_meta(scenario, p.value(), m), m.table, m.matches);
            dir.write("results_" + stem + ".json", results.dump(2) + "\n");
            const std::string table = render_delay_table(m.table, table_caption(p.value(), m.method));
            dir.write("delay_table_" + stem + ".txt", table);
            dir.write("plot_" + stem + ".csv",
                      format_plot_data(make_plot_columns(scenario, sim, outcome, m.method, options),
                                       scenario.fingerprint()));
            json entry = {{"penetration", p.value()}, {"method", method_name(m.method)}};
            entry["delay_table"] = delay_table_to_json(m.table);
            summary.push_back(entry);
            rendered += table + "\n";
        }
    }
    dir.write("summary.json", summary.dump(2) + "\n");
    if (a.format == "json") {
        out << summary.dump(2) << "\n";
    } else {
        out << rendered;
    }
}

void cmd_export_plot_data(const CommonArgs& a, bool offline, RunDirectory& dir, ManifestInfo& info,
                          std::ostream& out) {
    const ValidatedScenario scenario = load_scenario(a);
    info.fingerprint = scenario.fingerprint();
    info.master_seed = scenario.config().master_seed;
    const SimulationResult sim = obtain_events(scenario, a);
    const auto methods = selected_methods(a.method);
    const ExperimentOptions options = experiment_options(a);
    dir.write("config.json", config_document(scenario));
    for (const PenetrationRate p : selected_penetrations(a.penetrations)) {
        info.penetrations.push_back(p.value());
        const PenetrationOutcome outcome = run_penetration(scenario, sim, p, methods, options);
        for (const auto& m : outcome.methods) {
            const std::string name =
                "plot_" + std::string(method_name(m.method)) + "_" + penetration_tag(p.value()) + ".csv";
            dir.write(name, format_plot_data(make_plot_columns(scenario, sim, outcome, m.method, options, offline),
                                             scenario.fingerprint()));
            out << "wrote " << name << "\n";
        }
    }
}

void cmd_evaluate(const std::string& truth_path, const std::string& estimate_path, const std::string& format,
                  RunDirectory* dir, std::ostream& out) {
    const LabelSeries truth = read_labels(truth_path);
    const LabelSeries estimate = read_labels(estimate_path);
    if (truth.start_s != estimate.start_s || truth.step_s != estimate.step_s || truth.size() != estimate.size()) {
        throw InvariantError("label files are on different grids");
    }
    const MatchResult result = match_transitions(extract_transitions(truth), extract_transitions(estimate));
    const DelayTable table = delay_table(result);
    ResultsMeta meta;
    meta.method = "external";
    const json doc = results_document(meta, table, result);
    const std::string rendered = render_delay_table(table, "Delay of state estimation.");
    if (dir) {
        dir->write("results.json", doc.dump(2) + "\n");
        dir->write("delay_table.txt", rendered);
    }
    if (format == "json") {
        out << doc.dump(2) << "\n";
    } else {
        out << rendered;
    }
}

void add_common(CLI::App* cmd, CommonArgs& a, bool penetrations, bool method, bool events) {
    cmd->add_option("--config", a.config_path, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out_dir, "Run directory")->required();
    cmd->add_option("--seed", a.seed, "Override the config's master seed");
    cmd->add_flag("--overwrite", a.overwrite, "Replace a non-empty run directory");
    if (penetrations) {
        cmd->add_option("--penetration", a.penetrations, "App penetration rate in (0,1]; repeatable")
            ->allow_extra_args(false)
            ->check(CLI::Validator(
                [](std::string& v) {
                    const double p = std::stod(v);
                    return p > 0 && p <= 1 ? std::string() : "penetration must be in (0, 1], got " + v;
                },
                "(0,1]"));
    }
    if (method) {
        cmd->add_option("--method", a.method, "naive | meanday | both")
            ->check(CLI::IsMember({"naive", "meanday", "both"}));
        cmd->add_flag("--recalibrate-meanday", a.recalibrate_meanday,
                      "Grid-search separate thresholds for the mean-day curves");
    }
    if (events) cmd->add_option("--events", a.events_path, "Use this event log instead of simulating");
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Truck parking occupancy workbench", "truckpark"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonArgs sim_args, obs_args, est_args, all_args, plot_args;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Simulate the lot and write events and true occupancy");
    add_common(sim_cmd, sim_args, false, false, false);

    CLI::App* obs_cmd = app.add_subcommand("observe", "Sample app users and write observed series");
    add_common(obs_cmd, obs_args, true, false, true);

    CLI::App* est_cmd = app.add_subcommand("estimate", "Calibrate thresholds and write estimated labels");
    add_common(est_cmd, est_args, true, true, true);

    CLI::App* all_cmd = app.add_subcommand("run-all", "Full experiment: simulate, observe, estimate, evaluate");
    add_common(all_cmd, all_args, true, true, true);
    all_cmd->add_option("--format", all_args.format, "Delay table output: text | json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI::App* plot_cmd = app.add_subcommand("export-plot-data", "Write aligned columns for figures");
    add_common(plot_cmd, plot_args, true, true, true);
    bool offline = false;
    plot_cmd->add_flag("--offline", offline, "Use centered (non-causal) smoothing in the smoothed column");

    std::string truth_path, estimate_path, eval_format = "text", eval_out;
    bool eval_overwrite = false;
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "Delay table of an estimated label file against the truth");
    eval_cmd->add_option("--truth", truth_path, "True label file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--estimate", estimate_path, "Estimated label file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--format", eval_format, "text | json")->check(CLI::IsMember({"text", "json"}));
    eval_cmd->add_option("--out", eval_out, "Optional run directory for the results document");
    eval_cmd->add_flag("--overwrite", eval_overwrite, "Replace a non-empty run directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }

    ManifestInfo info;
    info.command_line = args;

    const auto run_in_dir = [&](const CommonArgs& a, auto&& body) -> int {
        std::optional<RunDirectory> dir;
        try {
            dir.emplace(a.out_dir, a.overwrite);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        }
        std::string error;
        try {
            body(*dir);
        } catch (const std::exception& e) {
            error = e.what();
        }
        try {
            write_manifest(*dir, info, error);
        } catch (const std::exception& e) {
            err << "error: cannot write manifest: " << e.what() << "\n";
            return 1;
        }
        if (!error.empty()) {
            err << "error: " << error << "\n";
            return 1;
        }
        return 0;
    };

    if (*sim_cmd) return run_in_dir(sim_args, [&](RunDirectory& d) { cmd_simulate(sim_args, d, info, out); });
    if (*obs_cmd) return run_in_dir(obs_args, [&](RunDirectory& d) { cmd_observe(obs_args, d, info, out); });
    if (*est_cmd) return run_in_dir(est_args, [&](RunDirectory& d) { cmd_estimate(est_args, d, info, out); });
    if (*all_cmd) return run_in_dir(all_args, [&](RunDirectory& d) { cmd_run_all(all_args, d, info, out); });
    if (*plot_cmd) {
        return run_in_dir(plot_args, [&](RunDirectory& d) { cmd_export_plot_data(plot_args, offline, d, info, out); });
    }
    if (*eval_cmd) {
        if (eval_out.empty()) {
            try {
                cmd_evaluate(truth_path, estimate_path, eval_format, nullptr, out);
                return 0;
            } catch (const std::exception& e) {
                err << "error: " << e.what() << "\n";
                return 1;
            }
        }
        CommonArgs a;
        a.out_dir = eval_out;
        a.overwrite = eval_overwrite;
        return run_in_dir(a, [&](RunDirectory& d) { cmd_evaluate(truth_path, estimate_path, eval_format, &d, out); });
    }
    return 2;
}

} // namespace truckpark
