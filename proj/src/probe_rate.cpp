#include "roccet_lab/probe_rate.hpp"

#include <algorithm>

namespace roccet_lab {

void ProbeRateParams::validate() const {
    if (!(startup_gain > 1)) throw ValidationError("probe_rate.startup_gain must be > 1");
    if (!(cwnd_gain > 0)) throw ValidationError("probe_rate.cwnd_gain must be > 0");
    if (bw_window_rounds < 1) throw ValidationError("probe_rate.bw_window_rounds must be >= 1");
    if (min_rtt_window <= Duration::zero() || probe_rtt_duration <= Duration::zero())
        throw ValidationError("probe_rate durations must be > 0");
    if (!(probe_rtt_cwnd >= 1)) throw ValidationError("probe_rate.probe_rtt_cwnd must be >= 1");
    if (segment_bytes <= 0) throw ValidationError("probe_rate.segment_bytes must be > 0");
}

std::string_view to_string(ProbeMode mode) {
    switch (mode) {
        case ProbeMode::Startup: return "Startup";
        case ProbeMode::Drain: return "Drain";
        case ProbeMode::ProbeBw: return "ProbeBw";
        case ProbeMode::ProbeRtt: return "ProbeRtt";
    }
    return "unknown";
}

SegCount probe_bdp(const ProbeRateState& state, const ProbeRateParams& params) {
    if (!state.min_rtt || state.bw_samples.empty()) return 0;
    return state.max_bw_bps() * to_seconds(*state.min_rtt) / (8.0 * params.segment_bytes);
}

std::pair<CcState, ProbeRateState> probe_rate_on_ack(CcState cc, ProbeRateState st,
                                                     const AckInfo& ack,
                                                     const ProbeRateParams& params) {
    if (ack.round_start) ++st.round_count;

    // Windowed max of delivery-rate samples (monotone deque).
    if (ack.delivery_rate_bps && *ack.delivery_rate_bps > 0) {
        const double bw = *ack.delivery_rate_bps;
        while (!st.bw_samples.empty() && st.bw_samples.back().second <= bw) st.bw_samples.pop_back();
        st.bw_samples.emplace_back(st.round_count, bw);
    }
    while (!st.bw_samples.empty() &&
           st.bw_samples.front().first <= st.round_count - params.bw_window_rounds)
        st.bw_samples.pop_front();

    const bool min_rtt_expired = st.min_rtt && ack.now - st.min_rtt_stamp > params.min_rtt_window;
    if (ack.rtt_sample > Duration::zero() &&
        (!st.min_rtt || ack.rtt_sample <= *st.min_rtt || min_rtt_expired)) {
        st.min_rtt = ack.rtt_sample;
        st.min_rtt_stamp = ack.now;
    }

    switch (st.mode) {
        case ProbeMode::Startup:
            if (ack.round_start && st.max_bw_bps() > 0) {
                if (st.max_bw_bps() >= st.full_bw * 1.25) {
                    st.full_bw = st.max_bw_bps();
                    st.full_bw_rounds = 0;
                } else if (++st.full_bw_rounds >= 3) {
                    st.filled_pipe = true;
                    st.mode = ProbeMode::Drain;
                }
            }
            break;
        case ProbeMode::Drain:
            if (ack.in_flight <= probe_bdp(st, params)) {
                st.mode = ProbeMode::ProbeBw;
                st.cycle_index = 2;
                st.cycle_start = ack.now;
            }
            break;
        case ProbeMode::ProbeBw:
            if (st.min_rtt && ack.now - st.cycle_start > *st.min_rtt) {
                st.cycle_index = (st.cycle_index + 1) % kProbeGainCycle.size();
                st.cycle_start = ack.now;
            }
            break;
        case ProbeMode::ProbeRtt:
            if (st.probe_rtt_done_at && ack.now >= *st.probe_rtt_done_at) {
                cc.cwnd = std::max(cc.cwnd, st.saved_cwnd);
                st.min_rtt_stamp = ack.now;
                st.probe_rtt_done_at.reset();
                st.mode = st.filled_pipe ? ProbeMode::ProbeBw : ProbeMode::Startup;
                st.cycle_start = ack.now;
            }
            break;
    }

    if (min_rtt_expired && st.mode != ProbeMode::ProbeRtt) {
        st.mode = ProbeMode::ProbeRtt;
        st.saved_cwnd = cc.cwnd;
        st.probe_rtt_done_at = ack.now + params.probe_rtt_duration;
    }

    switch (st.mode) {
        case ProbeMode::Startup: st.pacing_gain = params.startup_gain; break;
        case ProbeMode::Drain: st.pacing_gain = 1.0 / params.startup_gain; break;
        case ProbeMode::ProbeBw: st.pacing_gain = kProbeGainCycle[st.cycle_index]; break;
        case ProbeMode::ProbeRtt: st.pacing_gain = 1.0; break;
    }

    if (st.max_bw_bps() > 0) {
        st.pacing_rate_bps = st.pacing_gain * st.max_bw_bps();
    } else if (ack.srtt > Duration::zero()) {
        st.pacing_rate_bps =
            st.pacing_gain * cc.cwnd * 8.0 * params.segment_bytes / to_seconds(ack.srtt);
    }

    if (st.mode == ProbeMode::ProbeRtt) {
        cc.cwnd = params.probe_rtt_cwnd;
    } else {
        const SegCount target = params.cwnd_gain * probe_bdp(st, params);
        if (st.filled_pipe)
            cc.cwnd = std::min(cc.cwnd + ack.newly_acked, target);
        else if (target <= 0 || cc.cwnd < target)
            cc.cwnd += ack.newly_acked;
        cc.cwnd = std::max(cc.cwnd, params.probe_rtt_cwnd);
    }
    cc.phase = st.mode == ProbeMode::Startup ? Phase::SlowStart : Phase::CongestionAvoidance;
    return {std::move(cc), std::move(st)};
}

}  // namespace roccet_lab
