#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "roccet_lab/netsim.hpp"

namespace roccet_lab {

/// Half-open measurement window [from, to).
struct Window {
    SimTime from;
    SimTime to;

    Duration length() const { return to - from; }
};

inline constexpr double kWarmupFraction = 0.10;

/// Excludes the first 10 % of the run.
Window default_window(SimTime end_time);
Window default_window(const TraceSet& trace);

struct FlowMetrics {
    int flow_id = 0;
    Algo algo = Algo::Cubic;
    std::vector<std::pair<SimTime, double>> goodput_series;  // Mbps
    std::vector<std::pair<SimTime, double>> srtt_series;     // ms
    std::int64_t bytes_in_window = 0;
    double total_goodput_mbps = 0;  // mean over the active part of the window
    std::map<CeKind, int> ce_counts;

    int ce_count(CeKind kind) const;
};

FlowMetrics flow_metrics(const TraceSet& trace, int flow_id, const Window& window);
std::vector<FlowMetrics> all_flow_metrics(const TraceSet& trace, const Window& window);

struct ShareReport {
    Window window;
    std::vector<std::pair<int, double>> fractions;  // (flow id, share of bytes)
    double jain = 0;
    std::optional<double> harm;

    double fraction_of(int flow_id) const;
};

/// (Σx)² / (n Σx²). Throws ValidationError for an empty or all-zero input.
double jain_index(std::span<const double> allocations);

/// Throws ValidationError when the window is empty or no bytes were delivered.
ShareReport bandwidth_share(const TraceSet& trace, const Window& window);

/// max(0, (solo - competing) / solo) on total goodput. Throws when solo is zero.
double harm(const FlowMetrics& solo, const FlowMetrics& competing);
double harm(double solo_mbps, double competing_mbps);

/// Nearest-rank percentile, p in [0, 100]. Throws on empty input.
double nearest_rank(std::vector<double> values, double p);

struct Distribution {
    double p25 = 0, p50 = 0, p75 = 0, max = 0;
};

Distribution distribution(const std::vector<double>& values);

struct SummaryRow {
    std::string label;
    int flow_id = 0;
    std::size_t samples = 0;
    Distribution srtt_ms;
    Distribution goodput_mbps;
    std::map<CeKind, int> ce_counts;
};

/// Percentile table over samples inside the window. Throws ValidationError
/// naming the window when a flow has no samples in it.
std::vector<SummaryRow> summarize(const TraceSet& trace, const Window& window);
std::vector<SummaryRow> summarize_samples(const std::vector<TraceSample>& samples, const Window& window,
                                          const std::string& label_prefix);

/// Aligned text table: one column per row of `rows`.
std::string format_table(const std::vector<SummaryRow>& rows);
nlohmann::json to_json(const SummaryRow& row);
nlohmann::json to_json(const ShareReport& report);

}  // namespace roccet_lab
