#include "roccet_lab/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "roccet_lab/harness.hpp"
#include "roccet_lab/metrics.hpp"
#include "roccet_lab/netsim.hpp"
#include "roccet_lab/trace_io.hpp"

namespace roccet_lab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Environment or I/O failure, as opposed to a bad input.
class RuntimeFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string builtin;
    std::string scenario_file;
    std::string algo;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::string summary_format = "text";
};

struct SweepOptions {
    std::string builtin;
    std::string sweep_file;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> repetitions;
    std::vector<std::string> overrides;
    bool serial = false;
    bool with_64_bdp = false;
};

struct ReportOptions {
    std::vector<std::string> paths;
    std::string format = "text";
};

std::string output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
    return "out";
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeFault("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw RuntimeFault("cannot write '" + path.string() + "'");
    f << content;
    if (!f) throw RuntimeFault("write failed for '" + path.string() + "'");
}

std::string window_line(const Window& w) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "window: [%.3f s, %.3f s)\n", seconds_since_start(w.from), seconds_since_start(w.to));
    return buf;
}

ScenarioSpec resolve_scenario(const RunOptions& o) {
    if (o.builtin.empty() == o.scenario_file.empty())
        throw ValidationError("give exactly one of --builtin or --scenario");
    ScenarioSpec spec = o.builtin.empty() ? load_scenario_file(o.scenario_file) : builtin_scenario(o.builtin);
    if (!o.algo.empty()) {
        const auto algo = parse_algo(o.algo);
        if (!algo) throw ValidationError("unknown algorithm '" + o.algo + "'");
        for (auto& f : spec.flows) f.algo = *algo;
    }
    if (o.seed) spec.seed = *o.seed;
    spec = with_overrides(spec, o.overrides);
    spec.validate();
    return spec;
}

std::string summary_text(const TraceSet& trace) {
    const Window window = default_window(trace);
    std::ostringstream s;
    s << "# roccet-lab summary\n";
    s << "scenario: " << trace.config.value("name", "") << '\n';
    s << window_line(window);
    s << '\n' << format_table(summarize(trace, window)) << '\n';
    const auto share = bandwidth_share(trace, window);
    for (const auto& [id, frac] : share.fractions) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "share flow %d: %.4f\n", id, frac);
        s << buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "jain: %.4f\n", share.jain);
    s << buf;
    bool balanced = std::all_of(trace.audits.begin(), trace.audits.end(), [](const auto& a) { return a.balanced(); });
    s << "conservation: " << (balanced ? "ok" : "VIOLATED") << '\n';
    s << "\n# resolved config\n" << trace.config.dump(2) << '\n';
    return s.str();
}

json summary_json(const TraceSet& trace) {
    const Window window = default_window(trace);
    json rows = json::array();
    for (const auto& r : summarize(trace, window)) rows.push_back(to_json(r));
    return {{"format", "roccet-lab summary v1"},
            {"flows", rows},
            {"share", to_json(bandwidth_share(trace, window))},
            {"config", trace.config}};
}

int cmd_run(const RunOptions& o, std::ostream& out) {
    const ScenarioSpec spec = resolve_scenario(o);
    const TraceSet trace = run(spec);
    const fs::path dir = prepare_dir(output_dir(o.out_dir));
    write_file(dir / "trace.csv", trace_csv(trace));
    write_file(dir / "events.json", events_json(trace).dump(2) + "\n");
    if (o.summary_format == "json")
        write_file(dir / "summary.json", summary_json(trace).dump(2) + "\n");
    else
        write_file(dir / "summary.txt", summary_text(trace));
    out << "wrote " << (dir / "trace.csv").string() << ", events.json, summary." << (o.summary_format == "json" ? "json" : "txt")
        << " (" << trace.samples.size() << " samples, " << trace.ce_events.size() << " congestion events)\n";
    return kExitOk;
}

SweepSpec resolve_sweep(const SweepOptions& o) {
    if (o.builtin.empty() == o.sweep_file.empty()) throw ValidationError("give exactly one of --builtin or --sweep");
    SweepSpec sweep = o.builtin.empty() ? load_sweep_file(o.sweep_file) : builtin_sweep(o.builtin);
    if (o.seed) sweep.base.seed = *o.seed;
    if (o.repetitions) sweep.repetitions = *o.repetitions;
    sweep.base = with_overrides(sweep.base, o.overrides);
    if (o.with_64_bdp)
        for (auto& a : sweep.axes)
            if (a.path == "buffer_bdp" && std::find(a.values.begin(), a.values.end(), json(64)) == a.values.end())
                a.values.push_back(64);
    return sweep;
}

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
    const SweepSpec sweep = resolve_sweep(o);
    const auto results = run_sweep(sweep, o.serial ? Execution::Serial : Execution::Parallel);
    const fs::path dir = prepare_dir(output_dir(o.out_dir));
    std::ostringstream csv;
    write_results_csv(csv, sweep, results);
    write_file(dir / "results.csv", csv.str());
    write_file(dir / "sweep.json", to_json(sweep).dump(2) + "\n");

    std::map<std::string, std::pair<double, double>> jain_range;  // per axis point: min, max
    std::vector<std::string> order;
    for (const auto& r : results) {
        std::string key;
        for (const auto& [path, value] : r.point) key += (key.empty() ? "" : " ") + path + "=" + value.dump();
        auto [it, fresh] = jain_range.try_emplace(key, r.share.jain, r.share.jain);
        if (fresh) order.push_back(key);
        it->second.first = std::min(it->second.first, r.share.jain);
        it->second.second = std::max(it->second.second, r.share.jain);
    }
    for (const auto& key : order) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "  jain %.3f..%.3f", jain_range[key].first, jain_range[key].second);
        out << key << buf << '\n';
    }
    out << "wrote " << (dir / "results.csv").string() << " (" << results.size() << " runs)\n";
    return kExitOk;
}

std::map<int, std::map<CeKind, int>> sibling_ce_counts(const fs::path& trace_path, const Window& window) {
    std::map<int, std::map<CeKind, int>> counts;
    const fs::path events = trace_path.parent_path() / "events.json";
    if (!fs::exists(events)) return counts;
    std::ifstream in(events);
    const json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.contains("ce") || !doc["ce"].is_array())
        throw TraceFormatError(events.string() + ":0: not a roccet-lab events file");
    for (const auto& e : doc["ce"]) {
        const auto kind = parse_ce_kind(e.value("kind", ""));
        const SimTime at = kSimStart + from_millis(e.value("time_ms", 0.0));
        if (kind && at >= window.from && at < window.to) ++counts[e.value("flow_id", 0)][*kind];
    }
    return counts;
}

int cmd_report(const ReportOptions& o, std::ostream& out) {
    std::vector<SummaryRow> rows;
    for (const auto& path : o.paths) {
        const CsvTrace trace = read_trace_csv_file(path);
        if (trace.samples.empty()) throw ValidationError(path + ": trace has no samples");
        SimTime end = kSimStart;
        for (const auto& s : trace.samples) end = std::max(end, s.at);
        const Window window = default_window(end);
        auto file_rows = summarize_samples(trace.samples, window, path);
        const auto ce = sibling_ce_counts(path, window);
        for (auto& r : file_rows) {
            if (const auto it = ce.find(r.flow_id); it != ce.end()) r.ce_counts = it->second;
            rows.push_back(std::move(r));
        }
    }
    if (o.format == "json") {
        json doc = json::array();
        for (const auto& r : rows) doc.push_back(to_json(r));
        out << doc.dump(2) << '\n';
    } else {
        out << format_table(rows);
    }
    return kExitOk;
}

int cmd_list(std::ostream& out) {
    out << "scenarios:\n";
    for (const auto& name : builtin_scenario_names()) {
        const auto s = builtin_scenario(name);
        char buf[160];
        std::snprintf(buf, sizeof buf, "  %-16s %g Mbps x %g ms, %g BDP, %d flow(s), %g s\n", name.c_str(),
                      s.link.initial_rate_bps() / 1e6, to_millis(s.link.base_rtt()), s.buffer_bdp_multiplier,
                      s.total_flows(), to_seconds(s.horizon));
        out << buf;
    }
    out << "sweeps:\n";
    for (const auto& name : builtin_sweep_names()) {
        const auto s = builtin_sweep(name);
        char buf[128];
        std::snprintf(buf, sizeof buf, "  %-16s %zu runs\n", name.c_str(), s.size());
        out << buf;
    }
    return kExitOk;
}

void fail(std::ostream& err, const char* kind, const std::string& reason, const std::string& detail) {
    std::string line = reason;
    std::replace(line.begin(), line.end(), '\n', ' ');
    err << "error: " << kind << ": " << line << '\n';
    if (!detail.empty()) err << detail << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discrete-event lab for CUBIC and ROCCET congestion control", "roccet-lab"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write trace.csv, events.json and a summary");
    auto* run_builtin = run_cmd->add_option("--builtin", run_opts.builtin, "Builtin scenario name");
    auto* run_file = run_cmd->add_option("--scenario", run_opts.scenario_file, "Scenario JSON file");
    run_builtin->excludes(run_file);
    run_cmd->add_option("--algo", run_opts.algo, "Replace every flow's algorithm (reno, cubic, roccet, probe_rate)");
    run_cmd->add_option("-o,--out", run_opts.out_dir, std::string("Output directory (default $") + kOutputEnv + " or ./out)");
    run_cmd->add_option("--seed", run_opts.seed, "Seed override");
    run_cmd->add_option("--set", run_opts.overrides, "Override a scenario key: dotted.path=value")->allow_extra_args(false);
    run_cmd->add_option("--summary-format", run_opts.summary_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    SweepOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario matrix and write results.csv");
    auto* sweep_builtin = sweep_cmd->add_option("--builtin", sweep_opts.builtin, "Builtin sweep name");
    auto* sweep_file = sweep_cmd->add_option("--sweep", sweep_opts.sweep_file, "Sweep JSON file");
    sweep_builtin->excludes(sweep_file);
    sweep_cmd->add_option("-o,--out", sweep_opts.out_dir, "Output directory");
    sweep_cmd->add_option("--seed", sweep_opts.seed, "Base seed override");
    sweep_cmd->add_option("--reps", sweep_opts.repetitions, "Repetitions per axis point")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--set", sweep_opts.overrides, "Override a base scenario key")->allow_extra_args(false);
    sweep_cmd->add_flag("--serial", sweep_opts.serial, "Run cells one after another");
    sweep_cmd->add_flag("--with-64bdp", sweep_opts.with_64_bdp, "Add a 64-BDP point to the buffer axis");

    ReportOptions report_opts;
    auto* report_cmd = app.add_subcommand("report", "Compare trace CSV files side by side");
    report_cmd->add_option("traces", report_opts.paths, "trace.csv files")->required();
    report_cmd->add_option("--format", report_opts.format, "text or json")->check(CLI::IsMember({"text", "json"}));

    auto* list_cmd = app.add_subcommand("list-scenarios", "List builtin scenarios and sweeps");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        fail(err, "usage", e.what(), "run 'roccet-lab --help' for usage");
        return kExitValidation;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts, out);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, out);
        if (report_cmd->parsed()) return cmd_report(report_opts, out);
        if (list_cmd->parsed()) return cmd_list(out);
    } catch (const TraceFormatError& e) {
        fail(err, "trace", e.what(), "the file must be a roccet-lab trace v1 CSV");
        return kExitValidation;
    } catch (const ValidationError& e) {
        fail(err, "validation", e.what(), "see 'roccet-lab list-scenarios' and the schema in README.md");
        return kExitValidation;
    } catch (const json::exception& e) {
        fail(err, "validation", e.what(), "input is not well-formed JSON");
        return kExitValidation;
    } catch (const std::exception& e) {
        fail(err, "runtime", e.what(), "the run was aborted");
        return kExitRuntime;
    }
    return kExitRuntime;
}

}  // namespace roccet_lab::cli
