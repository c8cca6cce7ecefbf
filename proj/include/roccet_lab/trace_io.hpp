#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "roccet_lab/netsim.hpp"

namespace roccet_lab {

inline constexpr const char* kTraceHeader = "# roccet-lab trace v1";
inline constexpr const char* kTraceColumns = "time_ms,flow_id,cwnd_seg,srtt_ms,goodput_mbps,queue_seg";

/// Malformed trace or event file. The message names the file and row.
class TraceFormatError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

void write_trace_csv(std::ostream& out, const TraceSet& trace);
std::string trace_csv(const TraceSet& trace);

nlohmann::json events_json(const TraceSet& trace);
void write_events_json(std::ostream& out, const TraceSet& trace);

/// What a trace CSV carries: the resolved config and the sample rows.
/// delivered_bytes and phase are not part of the file and stay zero/default.
struct CsvTrace {
    std::string source;
    nlohmann::json config;
    std::vector<TraceSample> samples;
};

CsvTrace read_trace_csv(std::istream& in, const std::string& name);
CsvTrace read_trace_csv_file(const std::string& path);

}  // namespace roccet_lab
