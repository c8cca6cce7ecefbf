#include "roccet_lab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace roccet_lab {

namespace {

std::string window_text(const Window& w) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "[%.3f s, %.3f s)", seconds_since_start(w.from), seconds_since_start(w.to));
    return buf;
}

bool inside(const Window& w, SimTime t) { return t >= w.from && t < w.to; }

// Cumulative delivered bytes of one flow at time t, from the last sample at
// or before t. Flows are at zero before their first sample.
std::int64_t bytes_at(const std::vector<TraceSample>& samples, SimTime t) {
    std::int64_t bytes = 0;
    for (const auto& s : samples) {
        if (s.at > t) break;
        bytes = s.delivered_bytes;
    }
    return bytes;
}

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

Window default_window(SimTime end_time) {
    const auto span = end_time - kSimStart;
    const auto skip = Duration(std::llround(static_cast<double>(span.count()) * kWarmupFraction));
    return {kSimStart + skip, end_time + Duration(1)};
}

Window default_window(const TraceSet& trace) { return default_window(trace.end_time); }

int FlowMetrics::ce_count(CeKind kind) const {
    const auto it = ce_counts.find(kind);
    return it == ce_counts.end() ? 0 : it->second;
}

FlowMetrics flow_metrics(const TraceSet& trace, int flow_id, const Window& window) {
    FlowMetrics m;
    m.flow_id = flow_id;
    const auto it = std::find_if(trace.flows.begin(), trace.flows.end(), [&](const auto& f) { return f.id == flow_id; });
    if (it == trace.flows.end()) throw ValidationError("no flow with id " + std::to_string(flow_id));
    m.algo = it->algo;

    const auto samples = trace.samples_for(flow_id);
    for (const auto& s : samples) {
        if (!inside(window, s.at)) continue;
        m.goodput_series.emplace_back(s.at, s.goodput_mbps);
        m.srtt_series.emplace_back(s.at, to_millis(s.srtt));
    }
    const SimTime last = std::min(window.to, trace.end_time);
    m.bytes_in_window = bytes_at(samples, last) - bytes_at(samples, window.from);

    SimTime active_from = std::max(window.from, it->start);
    SimTime active_to = last;
    if (it->stop) active_to = std::min(active_to, *it->stop);
    if (active_to > active_from)
        m.total_goodput_mbps = static_cast<double>(m.bytes_in_window) * 8.0 / to_seconds(active_to - active_from) / 1e6;

    for (const auto& e : trace.ce_events)
        if (e.flow_id == flow_id && inside(window, e.record.at)) ++m.ce_counts[e.record.kind];
    return m;
}

std::vector<FlowMetrics> all_flow_metrics(const TraceSet& trace, const Window& window) {
    std::vector<FlowMetrics> out;
    for (const auto& f : trace.flows) out.push_back(flow_metrics(trace, f.id, window));
    return out;
}

double ShareReport::fraction_of(int flow_id) const {
    for (const auto& [id, frac] : fractions)
        if (id == flow_id) return frac;
    throw ValidationError("no flow with id " + std::to_string(flow_id) + " in share report");
}

double jain_index(std::span<const double> x) {
    if (x.empty()) throw ValidationError("jain index of an empty allocation");
    double sum = 0, sum_sq = 0;
    for (double v : x) {
        if (v < 0) throw ValidationError("jain index needs non-negative allocations");
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0) throw ValidationError("jain index of an all-zero allocation");
    return sum * sum / (static_cast<double>(x.size()) * sum_sq);
}

ShareReport bandwidth_share(const TraceSet& trace, const Window& window) {
    if (window.to <= window.from) throw ValidationError("empty measurement window " + window_text(window));
    ShareReport r;
    r.window = window;
    std::vector<double> bytes;
    for (const auto& f : trace.flows) bytes.push_back(static_cast<double>(flow_metrics(trace, f.id, window).bytes_in_window));
    const double total = std::accumulate(bytes.begin(), bytes.end(), 0.0);
    if (total <= 0) throw ValidationError("no bytes delivered in window " + window_text(window));
    for (std::size_t i = 0; i < bytes.size(); ++i) r.fractions.emplace_back(trace.flows[i].id, bytes[i] / total);
    r.jain = jain_index(bytes);
    return r;
}

double harm(double solo, double competing) {
    if (!(solo > 0)) throw ValidationError("harm is undefined for a solo goodput of zero");
    return std::max(0.0, (solo - competing) / solo);
}

double harm(const FlowMetrics& solo, const FlowMetrics& competing) {
    return harm(solo.total_goodput_mbps, competing.total_goodput_mbps);
}

double nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) throw ValidationError("percentile of an empty series");
    if (!(p >= 0 && p <= 100)) throw ValidationError("percentile must be in [0, 100]");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    return values[rank - 1];
}

Distribution distribution(const std::vector<double>& values) {
    return {nearest_rank(values, 25), nearest_rank(values, 50), nearest_rank(values, 75), nearest_rank(values, 100)};
}

std::vector<SummaryRow> summarize_samples(const std::vector<TraceSample>& samples, const Window& window,
                                          const std::string& label_prefix) {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_flow;
    std::vector<int> order;
    for (const auto& s : samples) {
        if (!by_flow.contains(s.flow_id)) order.push_back(s.flow_id);
        auto& [srtt, goodput] = by_flow[s.flow_id];
        if (!inside(window, s.at)) continue;
        srtt.push_back(to_millis(s.srtt));
        goodput.push_back(s.goodput_mbps);
    }
    if (order.empty()) throw ValidationError(label_prefix + ": no samples in window " + window_text(window));
    std::vector<SummaryRow> rows;
    for (int id : order) {
        const auto& [srtt, goodput] = by_flow[id];
        if (srtt.empty())
            throw ValidationError(label_prefix + ": flow " + std::to_string(id) + " has no samples in window " +
                                  window_text(window));
        SummaryRow row;
        row.label = order.size() == 1 ? label_prefix : label_prefix + "#" + std::to_string(id);
        row.flow_id = id;
        row.samples = srtt.size();
        row.srtt_ms = distribution(srtt);
        row.goodput_mbps = distribution(goodput);
        rows.push_back(row);
    }
    return rows;
}

std::vector<SummaryRow> summarize(const TraceSet& trace, const Window& window) {
    auto rows = summarize_samples(trace.samples, window, "flow");
    for (auto& row : rows) {
        row.label = "flow " + std::to_string(row.flow_id);
        for (const auto& e : trace.ce_events)
            if (e.flow_id == row.flow_id && inside(window, e.record.at)) ++row.ce_counts[e.record.kind];
    }
    return rows;
}

std::string format_table(const std::vector<SummaryRow>& rows) {
    std::vector<std::pair<std::string, std::vector<std::string>>> lines;
    auto add = [&](const std::string& name, auto getter) {
        std::vector<std::string> cells;
        for (const auto& r : rows) cells.push_back(getter(r));
        lines.emplace_back(name, std::move(cells));
    };
    add("", [](const SummaryRow& r) { return r.label; });
    add("srtt_ms p25", [](const SummaryRow& r) { return fmt(r.srtt_ms.p25, 1); });
    add("srtt_ms p50", [](const SummaryRow& r) { return fmt(r.srtt_ms.p50, 1); });
    add("srtt_ms p75", [](const SummaryRow& r) { return fmt(r.srtt_ms.p75, 1); });
    add("srtt_ms max", [](const SummaryRow& r) { return fmt(r.srtt_ms.max, 1); });
    add("goodput_mbps p25", [](const SummaryRow& r) { return fmt(r.goodput_mbps.p25, 2); });
    add("goodput_mbps p50", [](const SummaryRow& r) { return fmt(r.goodput_mbps.p50, 2); });
    add("goodput_mbps p75", [](const SummaryRow& r) { return fmt(r.goodput_mbps.p75, 2); });
    add("goodput_mbps max", [](const SummaryRow& r) { return fmt(r.goodput_mbps.max, 2); });
    for (CeKind kind : {CeKind::RoccetCe, CeKind::LossCe, CeKind::LaunchExit}) {
        add("ce " + std::string(to_string(kind)), [kind](const SummaryRow& r) {
            const auto it = r.ce_counts.find(kind);
            return std::to_string(it == r.ce_counts.end() ? 0 : it->second);
        });
    }

    std::size_t name_width = 0;
    std::vector<std::size_t> widths(rows.size(), 0);
    for (const auto& [name, cells] : lines) {
        name_width = std::max(name_width, name.size());
        for (std::size_t i = 0; i < cells.size(); ++i) widths[i] = std::max(widths[i], cells[i].size());
    }
    std::ostringstream out;
    for (const auto& [name, cells] : lines) {
        out << name << std::string(name_width - name.size(), ' ');
        for (std::size_t i = 0; i < cells.size(); ++i)
            out << "  " << std::string(widths[i] - cells[i].size(), ' ') << cells[i];
        out << '\n';
    }
    return out.str();
}

nlohmann::json to_json(const SummaryRow& row) {
    auto dist = [](const Distribution& d) {
        return nlohmann::json{{"p25", d.p25}, {"p50", d.p50}, {"p75", d.p75}, {"max", d.max}};
    };
    nlohmann::json ce = nlohmann::json::object();
    for (const auto& [kind, n] : row.ce_counts) ce[std::string(to_string(kind))] = n;
    return {{"label", row.label},
            {"flow_id", row.flow_id},
            {"samples", row.samples},
            {"srtt_ms", dist(row.srtt_ms)},
            {"goodput_mbps", dist(row.goodput_mbps)},
            {"ce", ce}};
}

nlohmann::json to_json(const ShareReport& r) {
    nlohmann::json fractions = nlohmann::json::array();
    for (const auto& [id, f] : r.fractions) fractions.push_back({{"flow_id", id}, {"fraction", f}});
    return {{"window_s", {seconds_since_start(r.window.from), seconds_since_start(r.window.to)}},
            {"fractions", fractions},
            {"jain", r.jain},
            {"harm", r.harm ? nlohmann::json(*r.harm) : nlohmann::json(nullptr)}};
}

}  // namespace roccet_lab
