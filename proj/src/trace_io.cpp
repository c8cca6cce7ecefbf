#include "roccet_lab/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace roccet_lab {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_double(const std::string& text, bool& ok) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        ok = false;
        return 0;
    }
    ok = used == text.size();
    return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const TraceSet& trace) {
    out << kTraceHeader << '\n';
    out << "# config " << trace.config.dump() << '\n';
    out << kTraceColumns << '\n';
    for (const auto& s : trace.samples) {
        out << fixed(millis_since_start(s.at), 3) << ',' << s.flow_id << ',' << fixed(s.cwnd, 3) << ','
            << fixed(to_millis(s.srtt), 3) << ',' << fixed(s.goodput_mbps, 6) << ',' << s.queue_segments << '\n';
    }
}

std::string trace_csv(const TraceSet& trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
}

json events_json(const TraceSet& trace) {
    json ce = json::array();
    for (const auto& e : trace.ce_events)
        ce.push_back({{"time_ms", millis_since_start(e.record.at)},
                      {"flow_id", e.flow_id},
                      {"kind", std::string(to_string(e.record.kind))},
                      {"cwnd_before", e.record.cwnd_before},
                      {"cwnd_after", e.record.cwnd_after}});
    json drops = json::array();
    for (const auto& d : trace.drops)
        drops.push_back({{"time_ms", millis_since_start(d.at)},
                         {"flow_id", d.flow_id},
                         {"seq", d.seq},
                         {"reason", std::string(to_string(d.reason))}});
    json audit = json::array();
    for (const auto& a : trace.audits)
        audit.push_back({{"flow_id", a.flow_id},
                         {"sent", a.sent},
                         {"delivered", a.delivered},
                         {"dropped", a.dropped},
                         {"in_flight", a.in_flight},
                         {"in_queue", a.in_queue},
                         {"goodput_bytes", a.goodput_bytes},
                         {"balanced", a.balanced()}});
    json flows = json::array();
    for (const auto& f : trace.flows)
        flows.push_back({{"flow_id", f.id},
                         {"algo", std::string(to_string(f.algo))},
                         {"start_ms", millis_since_start(f.start)},
                         {"stop_ms", f.stop ? json(millis_since_start(*f.stop)) : json(nullptr)}});
    return {{"format", "roccet-lab events v1"},
            {"config", trace.config},
            {"flows", flows},
            {"end_ms", millis_since_start(trace.end_time)},
            {"events_processed", trace.events_processed},
            {"ce", ce},
            {"drops", drops},
            {"audit", audit}};
}

void write_events_json(std::ostream& out, const TraceSet& trace) { out << events_json(trace).dump(2) << '\n'; }

CsvTrace read_trace_csv(std::istream& in, const std::string& name) {
    CsvTrace out;
    out.source = name;
    std::string line;
    std::size_t row = 0;
    auto fail = [&](const std::string& why) {
        throw TraceFormatError(name + ":" + std::to_string(row) + ": " + why);
    };

    ++row;
    if (!std::getline(in, line) || line != kTraceHeader) fail("missing header '" + std::string(kTraceHeader) + "'");
    ++row;
    if (!std::getline(in, line) || line.rfind("# config ", 0) != 0) fail("missing '# config' line");
    out.config = json::parse(line.substr(9), nullptr, false);
    if (out.config.is_discarded()) fail("config line is not valid JSON");
    ++row;
    if (!std::getline(in, line) || line != kTraceColumns) fail("expected columns '" + std::string(kTraceColumns) + "'");

    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 6) fail("expected 6 columns, got " + std::to_string(cells.size()));
        double v[6];
        for (int i = 0; i < 6; ++i) {
            bool ok = false;
            v[i] = parse_double(cells[i], ok);
            if (!ok) fail("column " + std::to_string(i + 1) + " is not a number: '" + cells[i] + "'");
        }
        TraceSample s;
        s.at = kSimStart + from_millis(v[0]);
        s.flow_id = static_cast<int>(v[1]);
        s.cwnd = v[2];
        s.srtt = from_millis(v[3]);
        s.goodput_mbps = v[4];
        s.queue_segments = static_cast<std::int64_t>(v[5]);
        out.samples.push_back(s);
    }
    return out;
}

CsvTrace read_trace_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceFormatError(path + ":0: cannot open file");
    return read_trace_csv(in, path);
}

}  // namespace roccet_lab
