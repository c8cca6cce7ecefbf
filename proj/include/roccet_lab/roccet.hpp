#pragma once

// ROCCET: CUBIC plus two delay-aware congestion detectors.
//
//   LAUNCH   slow-start exit. Every launch_interval it compares the segments
//            ACKed against cum_cwnd (cwnd summed once per RTT) and the
//            smoothed relative RTT inflation srRTT.
//   ORBITER  congestion avoidance. Every orbiter_interval_rtts RTTs an ACK
//            deficit above orbiter_deviation * cum_cwnd together with
//            srRTT >= srrtt_threshold is a ROCCET congestion event, followed
//            by a drain period with a frozen cwnd.
//
// srRTT_t = alpha * x_t + (1 - alpha) * srRTT_{t-1},  x_t = (sRTT - RTT_min) / RTT_min

#include <optional>
#include <utility>
#include <vector>

#include "roccet_lab/cc_core.hpp"

namespace roccet_lab {

/// How RTT boundaries for cum_cwnd accumulation are found.
enum class RoundClock {
    MinRtt,  // an RTT_min of wall time has elapsed since the last boundary
    Ack,     // a segment sent after the last boundary was ACKed
};

std::string_view to_string(RoundClock clock);
std::optional<RoundClock> parse_round_clock(std::string_view name);

struct RoccetParams {
    double alpha = 0.25;
    double srrtt_threshold = 1.0;
    SegCount launch_ack_margin = 10;
    Duration launch_interval = std::chrono::milliseconds(100);
    int orbiter_interval_rtts = 5;
    double orbiter_deviation = 0.20;
    Duration drain_duration = std::chrono::milliseconds(100);
    bool ignore_loss = false;
    bool rtt_min_refresh = false;
    Duration rtt_min_refresh_age = std::chrono::seconds(10);
    double rtt_min_refresh_alpha = 0.5;
    RoundClock round_clock = RoundClock::MinRtt;
    // A loss ignored in slow start still pins ssthresh to the current cwnd.
    bool loss_ends_slow_start = true;

    void validate() const;
};

struct RoccetState {
    double srrtt = 0;
    std::optional<Duration> rtt_min;
    SimTime rtt_min_updated_at{};
    std::optional<SimTime> interval_start;
    SimTime last_boundary{};
    SegCount acks_in_interval = 0;
    SegCount cum_cwnd_in_interval = 0;
    int rtts_elapsed_in_interval = 0;
    std::optional<SimTime> drain_until;
    bool is_initial_slow_start = true;
    std::vector<CeRecord> ce_log;

    bool in_drain(SimTime now) const { return drain_until && now < *drain_until; }
};

enum class LaunchDecision { Stay, ExitInitial, ExitLater };
enum class OrbiterDecision { None, RoccetCe };

RoccetState update_rtt_min(RoccetState state, Duration sample, SimTime now,
                           const RoccetParams& params);

/// Folds one smoothed-RTT observation into srRTT. Throws std::logic_error
/// when RTT_min has not been measured yet.
RoccetState update_srrtt(RoccetState state, Duration srtt_now, const RoccetParams& params);

RoccetState accumulate_interval(RoccetState state, SegCount newly_acked, SegCount current_cwnd,
                                bool rtt_boundary_crossed);

RoccetState reset_interval(RoccetState state, SimTime now);

/// True when this ACK closes an RTT for cum_cwnd accounting.
bool rtt_boundary_crossed(const RoccetState& state, const AckInfo& ack, const RoccetParams& params);
/// Number of whole RTTs closed by this ACK (0 or 1 for the ACK clock).
int rtt_boundaries_elapsed(const RoccetState& state, const AckInfo& ack, const RoccetParams& params);

/// Evaluates one LAUNCH interval. Counters are reset whatever the outcome.
std::pair<LaunchDecision, RoccetState> launch_check(RoccetState state, const CcState& cc,
                                                    SimTime now, const RoccetParams& params);

/// ExitInitial: cwnd halves, ssthresh follows, congestion avoidance starts.
std::pair<RoccetState, CcState> apply_launch_exit(RoccetState state, CcState cc, SimTime now,
                                                  const CubicParams& cubic);

CcState launch_on_loss(const RoccetState& state, CcState cc, const RoccetParams& params);

std::pair<OrbiterDecision, RoccetState> orbiter_check(RoccetState state, const CcState& cc,
                                                      SimTime now, const RoccetParams& params);

std::pair<RoccetState, CcState> apply_roccet_ce(RoccetState state, CcState cc, SimTime now,
                                                const RoccetParams& params,
                                                const CubicParams& cubic);

CcState orbiter_on_loss(const RoccetState& state, CcState cc, const RoccetParams& params,
                        const CubicParams& cubic, SimTime now);

/// Per-flow ROCCET controller driving the operations above on every ACK.
class RoccetController final : public CongestionController {
public:
    RoccetController(RoccetParams params, CubicParams cubic, SegCount initial_cwnd = 10);

    Algo algo() const override { return Algo::Roccet; }
    void on_ack(const AckInfo& ack) override;
    bool on_loss(LossSignal signal, SimTime now) override;
    const CcState& state() const override { return cc_; }
    std::span<const CeRecord> ce_log() const override { return roccet_.ce_log; }

    const RoccetState& roccet_state() const { return roccet_; }
    const RoccetParams& params() const { return params_; }

private:
    RoccetParams params_;
    CubicParams cubic_;
    CcState cc_;
    RoccetState roccet_;
};

}  // namespace roccet_lab
