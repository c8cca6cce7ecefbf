#include "roccet_lab/harness.hpp"

#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>

#include "roccet_lab/netsim.hpp"

namespace roccet_lab {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string_view to_string(Execution e) { return e == Execution::Serial ? "serial" : "parallel"; }

std::size_t SweepSpec::size() const {
    std::size_t n = repetitions > 0 ? static_cast<std::size_t>(repetitions) : 0;
    for (const auto& a : axes) n *= a.values.size();
    return n;
}

std::uint64_t derive_seed(std::uint64_t base_seed, const AxisPoint& point, int repetition) {
    std::string key;
    for (const auto& [path, value] : point) key += path + "=" + value.dump() + ";";
    key += "rep=" + std::to_string(repetition);
    return base_seed ^ splitmix64(fnv1a(key));
}

std::vector<SweepCell> expand(const SweepSpec& sweep) {
    if (sweep.repetitions < 1) throw ValidationError("repetitions must be >= 1");
    for (const auto& a : sweep.axes) {
        if (a.path.empty()) throw ValidationError("sweep axis needs a path");
        if (a.values.empty()) throw ValidationError("sweep axis '" + a.path + "' has no values");
    }
    const std::size_t total = sweep.size();
    if (total > sweep.cap)
        throw ValidationError("sweep has " + std::to_string(total) + " runs, above the cap of " + std::to_string(sweep.cap));

    const json base = to_json(sweep.base);
    std::vector<SweepCell> cells;
    cells.reserve(total);
    std::vector<std::size_t> digit(sweep.axes.size(), 0);
    const std::size_t points = total / static_cast<std::size_t>(sweep.repetitions);
    for (std::size_t p = 0; p < points; ++p) {
        AxisPoint point;
        json doc = base;
        for (std::size_t a = 0; a < sweep.axes.size(); ++a) {
            const auto& axis = sweep.axes[a];
            point.emplace_back(axis.path, axis.values[digit[a]]);
            set_json_path(doc, axis.path, axis.values[digit[a]]);
        }
        ScenarioSpec spec;
        try {
            spec = scenario_from_json(doc);
        } catch (const ValidationError& e) {
            std::string where;
            for (const auto& [path, value] : point) where += " " + path + "=" + value.dump();
            throw ValidationError("sweep cell" + where + ": " + e.what());
        }
        for (int rep = 0; rep < sweep.repetitions; ++rep) {
            SweepCell cell;
            cell.index = cells.size();
            cell.point = point;
            cell.repetition = rep;
            cell.spec = spec;
            cell.spec.seed = derive_seed(sweep.base.seed, point, rep);
            cells.push_back(std::move(cell));
        }
        // Odometer over the axes, last axis fastest.
        for (std::size_t a = sweep.axes.size(); a-- > 0;) {
            if (++digit[a] < sweep.axes[a].values.size()) break;
            digit[a] = 0;
        }
    }
    return cells;
}

SweepResult run_cell(const SweepCell& cell) {
    const TraceSet trace = run(cell.spec);
    const Window window = default_window(trace);
    SweepResult r;
    r.index = cell.index;
    r.point = cell.point;
    r.repetition = cell.repetition;
    r.seed = cell.spec.seed;
    r.share = bandwidth_share(trace, window);
    for (const auto& m : all_flow_metrics(trace, window)) {
        int ces = 0;
        for (const auto& [kind, n] : m.ce_counts) ces += n;
        r.flows.push_back({m.flow_id, m.algo, m.total_goodput_mbps, r.share.fraction_of(m.flow_id), ces});
    }
    r.conserved = true;
    for (const auto& a : trace.audits) r.conserved = r.conserved && a.balanced();
    return r;
}

std::vector<SweepResult> run_sweep(const SweepSpec& sweep, Execution exec) {
    const auto cells = expand(sweep);
    std::vector<SweepResult> results(cells.size());
    if (exec == Execution::Serial) {
        for (std::size_t i = 0; i < cells.size(); ++i) results[i] = run_cell(cells[i]);
        return results;
    }

    std::vector<std::exception_ptr> errors(cells.size());
    const auto n = static_cast<std::int64_t>(cells.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            results[i] = run_cell(cells[i]);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

void write_results_csv(std::ostream& out, const SweepSpec& sweep, const std::vector<SweepResult>& results) {
    out << "cell";
    for (const auto& a : sweep.axes) out << ',' << a.path;
    out << ",repetition,seed,flow_id,algo,goodput_mbps,fraction,ce_count,jain,conserved\n";
    for (const auto& r : results) {
        for (const auto& f : r.flows) {
            out << r.index;
            for (const auto& [path, value] : r.point) out << ',' << csv_cell(value);
            out << ',' << r.repetition << ',' << r.seed << ',' << f.flow_id << ',' << to_string(f.algo) << ','
                << fixed(f.goodput_mbps, 6) << ',' << fixed(f.fraction, 6) << ',' << f.ce_count << ','
                << fixed(r.share.jain, 6) << ',' << (r.conserved ? "true" : "false") << '\n';
        }
    }
}

json to_json(const SweepSpec& sweep) {
    json axes = json::array();
    for (const auto& a : sweep.axes) axes.push_back({{"path", a.path}, {"values", a.values}});
    return {{"name", sweep.name},
            {"base", to_json(sweep.base)},
            {"axes", axes},
            {"repetitions", sweep.repetitions},
            {"cap", sweep.cap}};
}

SweepSpec sweep_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("sweep document must be an object");
    SweepSpec s;
    for (const auto& [key, value] : doc.items()) {
        if (key == "name") {
            if (!value.is_string()) throw ValidationError("'name' must be a string");
            s.name = value.get<std::string>();
        } else if (key == "base") {
            // A builtin scenario name or a full scenario object.
            s.base = value.is_string() ? builtin_scenario(value.get<std::string>()) : scenario_from_json(value);
        } else if (key == "overrides") {
            if (!value.is_array()) throw ValidationError("'overrides' must be a list of \"path=value\" strings");
        } else if (key == "axes") {
            if (!value.is_array()) throw ValidationError("'axes' must be a list");
            for (const auto& a : value) {
                if (!a.is_object() || !a.contains("path") || !a.contains("values") || a.size() != 2 ||
                    !a["path"].is_string() || !a["values"].is_array())
                    throw ValidationError("each axis needs exactly 'path' (string) and 'values' (list)");
                s.axes.push_back({a["path"].get<std::string>(), a["values"].get<std::vector<json>>()});
            }
        } else if (key == "repetitions") {
            if (!value.is_number_integer()) throw ValidationError("'repetitions' must be an integer");
            s.repetitions = value.get<int>();
        } else if (key == "cap") {
            if (!value.is_number_unsigned()) throw ValidationError("'cap' must be a positive integer");
            s.cap = value.get<std::size_t>();
        } else {
            throw ValidationError("unknown key '" + key + "'");
        }
    }
    if (!doc.contains("base")) throw ValidationError("sweep needs a 'base' scenario");
    if (doc.contains("overrides")) {
        std::vector<std::string> assignments;
        for (const auto& o : doc["overrides"]) {
            if (!o.is_string()) throw ValidationError("'overrides' entries must be strings");
            assignments.push_back(o.get<std::string>());
        }
        s.base = with_overrides(s.base, assignments);
    }
    if (s.repetitions < 1) throw ValidationError("repetitions must be >= 1");
    return s;
}

SweepSpec load_sweep_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open sweep file '" + path + "'");
    const json doc = json::parse(in, nullptr, false, true);
    if (doc.is_discarded()) throw ValidationError("'" + path + "' is not valid JSON");
    return sweep_from_json(doc);
}

std::vector<std::string> builtin_sweep_names() {
    return {"fairness-10x40", "fairness-50x30", "intra-10x40", "intra-50x30"};
}

SweepSpec builtin_sweep(std::string_view name) {
    const auto buffers = std::vector<json>{1, 2, 4, 8, 16, 32};
    SweepSpec s;
    s.name = std::string(name);
    s.repetitions = 5;
    if (name == "fairness-10x40" || name == "fairness-50x30") {
        // A group of ROCCET flows against one CUBIC flow.
        s.base = builtin_scenario(name);
        s.axes = {{"n_flows", {1, 2, 4, 8, 16, 32}}, {"buffer_bdp", buffers}};
    } else if (name == "intra-10x40" || name == "intra-50x30") {
        // A group of ROCCET flows against one more ROCCET flow: 2, 4 and 8 in total.
        s.base = builtin_scenario(name == "intra-10x40" ? "fairness-10x40" : "fairness-50x30");
        s.base.name = s.name;
        s.base.flows[1].algo = Algo::Roccet;
        s.axes = {{"n_flows", {1, 3, 7}}, {"buffer_bdp", {1, 2, 4, 8}}};
    } else {
        throw ValidationError("unknown sweep '" + std::string(name) + "'");
    }
    return s;
}

}  // namespace roccet_lab
