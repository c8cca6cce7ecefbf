#include "roccet_lab/roccet.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace roccet_lab {

std::string_view to_string(RoundClock clock) {
    return clock == RoundClock::MinRtt ? "min_rtt" : "ack";
}

std::optional<RoundClock> parse_round_clock(std::string_view name) {
    if (name == "min_rtt") return RoundClock::MinRtt;
    if (name == "ack") return RoundClock::Ack;
    return std::nullopt;
}

void RoccetParams::validate() const {
    if (!(alpha > 0 && alpha <= 1)) throw ValidationError("roccet.alpha must be in (0, 1]");
    if (!(srrtt_threshold > 0)) throw ValidationError("roccet.srrtt_threshold must be > 0");
    if (!(launch_ack_margin >= 0)) throw ValidationError("roccet.launch_ack_margin must be >= 0");
    if (launch_interval <= Duration::zero() || drain_duration <= Duration::zero() ||
        rtt_min_refresh_age <= Duration::zero())
        throw ValidationError("roccet durations must be > 0");
    if (orbiter_interval_rtts < 1) throw ValidationError("roccet.orbiter_interval_rtts must be >= 1");
    if (!(orbiter_deviation > 0 && orbiter_deviation < 1))
        throw ValidationError("roccet.orbiter_deviation must be in (0, 1)");
    if (!(rtt_min_refresh_alpha > 0 && rtt_min_refresh_alpha <= 1))
        throw ValidationError("roccet.rtt_min_refresh_alpha must be in (0, 1]");
}

RoccetState update_rtt_min(RoccetState state, Duration sample, SimTime now,
                           const RoccetParams& params) {
    if (!state.rtt_min || sample < *state.rtt_min) {
        state.rtt_min = sample;
        state.rtt_min_updated_at = now;
    } else if (params.rtt_min_refresh && now - state.rtt_min_updated_at > params.rtt_min_refresh_age) {
        const double a = params.rtt_min_refresh_alpha;
        state.rtt_min = Duration(std::llround(a * static_cast<double>(sample.count()) +
                                              (1 - a) * static_cast<double>(state.rtt_min->count())));
        state.rtt_min_updated_at = now;
    }
    return state;
}

RoccetState update_srrtt(RoccetState state, Duration srtt_now, const RoccetParams& params) {
    if (!state.rtt_min) throw std::logic_error("update_srrtt: RTT_min has not been measured");
    const double min = static_cast<double>(state.rtt_min->count());
    // x < 0 is only reachable after an RTT_min refresh raised the minimum.
    const double x = std::max(0.0, (static_cast<double>(srtt_now.count()) - min) / min);
    state.srrtt = params.alpha * x + (1 - params.alpha) * state.srrtt;
    return state;
}

RoccetState accumulate_interval(RoccetState state, SegCount newly_acked, SegCount current_cwnd,
                                bool rtt_boundary) {
    state.acks_in_interval += newly_acked;
    if (rtt_boundary) {
        state.cum_cwnd_in_interval += current_cwnd;
        ++state.rtts_elapsed_in_interval;
    }
    return state;
}

RoccetState reset_interval(RoccetState state, SimTime now) {
    state.interval_start = now;
    state.last_boundary = now;
    state.acks_in_interval = 0;
    state.cum_cwnd_in_interval = 0;
    state.rtts_elapsed_in_interval = 0;
    return state;
}

bool rtt_boundary_crossed(const RoccetState& state, const AckInfo& ack, const RoccetParams& params) {
    return rtt_boundaries_elapsed(state, ack, params) > 0;
}

int rtt_boundaries_elapsed(const RoccetState& state, const AckInfo& ack, const RoccetParams& params) {
    if (params.round_clock == RoundClock::Ack) return ack.round_start ? 1 : 0;
    if (!state.rtt_min || *state.rtt_min <= Duration::zero()) return 0;
    return static_cast<int>((ack.now - state.last_boundary) / *state.rtt_min);
}

std::pair<LaunchDecision, RoccetState> launch_check(RoccetState state, const CcState& /*cc*/,
                                                    SimTime now, const RoccetParams& params) {
    // Sign of the difference differs between the prose and the flow chart;
    // the magnitude is what matters here.
    const SegCount diff = std::abs(state.acks_in_interval - state.cum_cwnd_in_interval);
    LaunchDecision decision = LaunchDecision::Stay;
    if (diff >= params.launch_ack_margin && state.srrtt >= params.srrtt_threshold)
        decision = state.is_initial_slow_start ? LaunchDecision::ExitInitial : LaunchDecision::ExitLater;
    return {decision, reset_interval(std::move(state), now)};
}

std::pair<RoccetState, CcState> apply_launch_exit(RoccetState state, CcState cc, SimTime now,
                                                  const CubicParams& cubic) {
    const SegCount before = cc.cwnd;
    cc.cwnd = std::max<SegCount>(1, cc.cwnd / 2);
    cc.ssthresh = cc.cwnd;
    cc.phase = Phase::CongestionAvoidance;
    cc.epoch = start_cubic_epoch(cc, now, cubic);
    state.is_initial_slow_start = false;
    state.ce_log.push_back({now, CeKind::LaunchExit, before, cc.cwnd});
    return {std::move(state), std::move(cc)};
}

CcState launch_on_loss(const RoccetState& /*state*/, CcState cc, const RoccetParams& params) {
    if (params.loss_ends_slow_start) cc.ssthresh = cc.cwnd;
    return cc;
}

std::pair<OrbiterDecision, RoccetState> orbiter_check(RoccetState state, const CcState& /*cc*/,
                                                      SimTime now, const RoccetParams& params) {
    OrbiterDecision decision = OrbiterDecision::None;
    if (!state.in_drain(now)) {
        const SegCount deficit = state.cum_cwnd_in_interval - state.acks_in_interval;
        if (deficit > params.orbiter_deviation * state.cum_cwnd_in_interval &&
            state.srrtt >= params.srrtt_threshold)
            decision = OrbiterDecision::RoccetCe;
    }
    return {decision, reset_interval(std::move(state), now)};
}

std::pair<RoccetState, CcState> apply_roccet_ce(RoccetState state, CcState cc, SimTime now,
                                                const RoccetParams& params,
                                                const CubicParams& cubic) {
    const SegCount before = cc.cwnd;
    if (cc.cwnd > cc.w_max) cc.w_max = cc.cwnd;
    cc.cwnd = std::max<SegCount>(1, cc.cwnd * cubic.beta_mult);
    cc.ssthresh = cc.cwnd;
    cc.phase = Phase::CongestionAvoidance;
    cc.epoch = start_cubic_epoch(cc, now, cubic);
    state.drain_until = now + params.drain_duration;
    state.ce_log.push_back({now, CeKind::RoccetCe, before, cc.cwnd});
    return {reset_interval(std::move(state), now), std::move(cc)};
}

CcState orbiter_on_loss(const RoccetState& /*state*/, CcState cc, const RoccetParams& params,
                        const CubicParams& cubic, SimTime now) {
    if (params.ignore_loss) return cc;
    return cubic_on_congestion_event(std::move(cc), cubic, now);
}

RoccetController::RoccetController(RoccetParams params, CubicParams cubic, SegCount initial_cwnd)
    : params_(params), cubic_(cubic), cc_(initial_cc_state(Algo::Roccet, initial_cwnd)) {
    params_.validate();
    cubic_.validate();
}

void RoccetController::on_ack(const AckInfo& ack) {
    const SimTime now = ack.now;
    if (ack.rtt_sample > Duration::zero())
        roccet_ = update_rtt_min(std::move(roccet_), ack.rtt_sample, now, params_);
    if (ack.srtt > Duration::zero() && roccet_.rtt_min)
        roccet_ = update_srrtt(std::move(roccet_), ack.srtt, params_);
    if (!roccet_.interval_start) roccet_ = reset_interval(std::move(roccet_), now);

    if (cc_.phase == Phase::Recovery) {
        if (ack.in_recovery) return;
        cc_.phase = Phase::CongestionAvoidance;
        roccet_ = reset_interval(std::move(roccet_), now);
    }
    if (ack.in_recovery) return;

    // Every RTT that elapsed since the last boundary adds one cwnd, even when
    // a gap in the ACK stream spans several of them.
    const int boundaries = rtt_boundaries_elapsed(roccet_, ack, params_);
    if (params_.round_clock == RoundClock::Ack)
        roccet_.last_boundary = boundaries > 0 ? now : roccet_.last_boundary;
    else
        roccet_.last_boundary += boundaries * *roccet_.rtt_min;
    roccet_ = accumulate_interval(std::move(roccet_), ack.newly_acked, cc_.cwnd, boundaries > 0);
    for (int i = 1; i < boundaries; ++i) roccet_ = accumulate_interval(std::move(roccet_), 0, cc_.cwnd, true);

    if (cc_.phase == Phase::SlowStart) {
        if (now - *roccet_.interval_start >= params_.launch_interval) {
            auto [decision, next] = launch_check(std::move(roccet_), cc_, now, params_);
            roccet_ = std::move(next);
            if (decision == LaunchDecision::ExitInitial) {
                std::tie(roccet_, cc_) = apply_launch_exit(std::move(roccet_), std::move(cc_), now, cubic_);
                return;
            }
            if (decision == LaunchDecision::ExitLater) {
                const SegCount before = cc_.cwnd;
                cc_ = cubic_on_congestion_event(std::move(cc_), cubic_, now);
                roccet_.ce_log.push_back({now, CeKind::LaunchExit, before, cc_.cwnd});
                return;
            }
        }
        cc_ = cubic_on_ack(std::move(cc_), ack, cubic_);
        if (cc_.phase != Phase::SlowStart) roccet_ = reset_interval(std::move(roccet_), now);
        return;
    }

    if (roccet_.in_drain(now)) return;
    if (roccet_.rtts_elapsed_in_interval >= params_.orbiter_interval_rtts) {
        auto [decision, next] = orbiter_check(std::move(roccet_), cc_, now, params_);
        roccet_ = std::move(next);
        if (decision == OrbiterDecision::RoccetCe) {
            std::tie(roccet_, cc_) = apply_roccet_ce(std::move(roccet_), std::move(cc_), now, params_, cubic_);
            return;
        }
    }
    cc_ = cubic_on_ack(std::move(cc_), ack, cubic_);
}

bool RoccetController::on_loss(LossSignal signal, SimTime now) {
    if (cc_.phase == Phase::SlowStart) {
        cc_ = launch_on_loss(roccet_, std::move(cc_), params_);
        if (params_.loss_ends_slow_start) roccet_.is_initial_slow_start = false;
        return false;
    }
    if (params_.ignore_loss) return false;

    const SegCount before = cc_.cwnd;
    if (signal == LossSignal::Timeout) {
        cc_ = cubic_on_timeout(std::move(cc_), cubic_, now);
    } else {
        cc_ = orbiter_on_loss(roccet_, std::move(cc_), params_, cubic_, now);
        cc_.phase = Phase::Recovery;
    }
    roccet_.is_initial_slow_start = false;
    roccet_.ce_log.push_back({now, CeKind::LossCe, before, cc_.cwnd});
    roccet_ = reset_interval(std::move(roccet_), now);
    return true;
}

}  // namespace roccet_lab
