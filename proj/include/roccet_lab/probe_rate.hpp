#pragma once

// Simplified model-based comparator: startup / drain / bandwidth-probe cycle /
// min-RTT probe. It borrows the BBR state machine shape but is not BBRv3
// (no ProbeBW-UP/DOWN sub-states, no loss or ECN response).

#include <array>
#include <deque>
#include <optional>
#include <utility>

#include "roccet_lab/cc_core.hpp"

namespace roccet_lab {

struct ProbeRateParams {
    double startup_gain = 2.885;  // 2 / ln 2
    double cwnd_gain = 2.0;
    int bw_window_rounds = 10;
    Duration min_rtt_window = std::chrono::seconds(10);
    Duration probe_rtt_duration = std::chrono::milliseconds(200);
    SegCount probe_rtt_cwnd = 4;
    int segment_bytes = 1500;

    void validate() const;
};

enum class ProbeMode { Startup, Drain, ProbeBw, ProbeRtt };

std::string_view to_string(ProbeMode mode);

inline constexpr std::array<double, 8> kProbeGainCycle{1.25, 0.75, 1, 1, 1, 1, 1, 1};

struct ProbeRateState {
    ProbeMode mode = ProbeMode::Startup;
    // (round, bits/s) samples; the front is the running maximum.
    std::deque<std::pair<std::int64_t, double>> bw_samples;
    std::int64_t round_count = 0;
    std::optional<Duration> min_rtt;
    SimTime min_rtt_stamp{};
    double full_bw = 0;
    int full_bw_rounds = 0;
    bool filled_pipe = false;
    std::size_t cycle_index = 2;
    SimTime cycle_start{};
    std::optional<SimTime> probe_rtt_done_at;
    SegCount saved_cwnd = 0;
    double pacing_gain = 2.885;
    double pacing_rate_bps = 0;

    double max_bw_bps() const { return bw_samples.empty() ? 0.0 : bw_samples.front().second; }
};

/// Estimated bandwidth-delay product in segments (0 until both estimates exist).
SegCount probe_bdp(const ProbeRateState& state, const ProbeRateParams& params);

std::pair<CcState, ProbeRateState> probe_rate_on_ack(CcState cc, ProbeRateState state,
                                                     const AckInfo& ack,
                                                     const ProbeRateParams& params);

}  // namespace roccet_lab
