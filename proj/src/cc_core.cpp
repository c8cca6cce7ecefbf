#include "roccet_lab/cc_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace roccet_lab {

namespace {

constexpr std::array<std::pair<Algo, std::string_view>, 4> kAlgoNames{{
    {Algo::Reno, "reno"},
    {Algo::Cubic, "cubic"},
    {Algo::Roccet, "roccet"},
    {Algo::ProbeRate, "probe_rate"},
}};

constexpr std::array<std::pair<CeKind, std::string_view>, 3> kCeNames{{
    {CeKind::RoccetCe, "RoccetCe"},
    {CeKind::LossCe, "LossCe"},
    {CeKind::LaunchExit, "LaunchExit"},
}};

// Slow-start growth shared by Reno and CUBIC. Returns the ACKed segments left
// over after crossing ssthresh (zero while still in slow start).
SegCount slow_start(CcState& state, SegCount acked) {
    if (state.ssthresh && state.cwnd + acked >= *state.ssthresh) {
        const SegCount used = std::max<SegCount>(0, *state.ssthresh - state.cwnd);
        state.cwnd = std::max(state.cwnd, *state.ssthresh);
        state.phase = Phase::CongestionAvoidance;
        return acked - used;
    }
    state.cwnd += acked;
    return 0;
}

}  // namespace

std::string_view to_string(Algo algo) {
    for (const auto& [a, name] : kAlgoNames)
        if (a == algo) return name;
    return "unknown";
}

std::optional<Algo> parse_algo(std::string_view name) {
    for (const auto& [a, n] : kAlgoNames)
        if (n == name) return a;
    return std::nullopt;
}

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::SlowStart: return "SlowStart";
        case Phase::CongestionAvoidance: return "CongestionAvoidance";
        case Phase::Recovery: return "Recovery";
    }
    return "unknown";
}

std::string_view to_string(CeKind kind) {
    for (const auto& [k, name] : kCeNames)
        if (k == kind) return name;
    return "unknown";
}

std::optional<CeKind> parse_ce_kind(std::string_view name) {
    for (const auto& [k, n] : kCeNames)
        if (n == name) return k;
    return std::nullopt;
}

void CubicParams::validate() const {
    if (!(c_scale > 0)) throw ValidationError("cubic.c must be > 0");
    if (!(beta_mult > 0 && beta_mult < 1)) throw ValidationError("cubic.beta must be in (0, 1)");
}

CcState initial_cc_state(Algo algo, SegCount initial_cwnd) {
    CcState s;
    s.cwnd = std::max<SegCount>(1, initial_cwnd);
    s.algo = algo;
    return s;
}

Seconds cubic_k(SegCount w_max, const CubicParams& params) {
    return Seconds(std::cbrt(w_max * (1.0 - params.beta_mult) / params.c_scale));
}

Seconds cubic_k(SegCount w_max, SegCount cwnd_after, double c_scale) {
    return Seconds(std::cbrt(std::max<SegCount>(0, w_max - cwnd_after) / c_scale));
}

SegCount cubic_window(Seconds t_since_epoch, SegCount w_max, const CubicParams& params) {
    const double d = t_since_epoch.count() - cubic_k(w_max, params).count();
    return std::max<SegCount>(1, params.c_scale * d * d * d + w_max);
}

SegCount cubic_window(Seconds t_since_epoch, const CubicEpoch& epoch, double c_scale) {
    const double d = t_since_epoch.count() - epoch.k.count();
    return std::max<SegCount>(1, c_scale * d * d * d + epoch.origin);
}

CubicEpoch start_cubic_epoch(const CcState& state, SimTime now, const CubicParams& params) {
    return CubicEpoch{
        .start = now,
        .origin = std::max(state.w_max, state.cwnd),
        .k = cubic_k(state.w_max, state.cwnd, params.c_scale),
    };
}

CcState cubic_on_ack(CcState state, const AckInfo& ack, const CubicParams& params) {
    if (ack.is_app_limited && params.freeze_when_app_limited) return state;
    if (state.phase == Phase::Recovery) return state;

    SegCount acked = ack.newly_acked;
    if (state.phase == Phase::SlowStart) {
        acked = slow_start(state, acked);
        if (state.phase == Phase::SlowStart) return state;
        state.epoch = start_cubic_epoch(state, ack.now, params);
        if (acked <= 0) return state;
    }

    if (!state.epoch) state.epoch = start_cubic_epoch(state, ack.now, params);
    const Seconds t = ack.now - state.epoch->start;
    const SegCount target = cubic_window(t, *state.epoch, params.c_scale);
    if (target > state.cwnd) {
        const SegCount gap = target - state.cwnd;
        state.cwnd += std::min(gap, acked * gap / state.cwnd);
    }
    return state;
}

CcState cubic_on_congestion_event(CcState state, const CubicParams& params, SimTime now) {
    if (state.cwnd < state.w_max && params.fast_convergence)
        state.w_max = state.cwnd * (2.0 - params.beta_mult) / 2.0;
    else
        state.w_max = state.cwnd;
    state.cwnd = std::max<SegCount>(1, state.cwnd * params.beta_mult);
    state.ssthresh = state.cwnd;
    state.phase = Phase::CongestionAvoidance;
    state.epoch = start_cubic_epoch(state, now, params);
    return state;
}

CcState cubic_on_timeout(CcState state, const CubicParams& params, SimTime now) {
    state = cubic_on_congestion_event(std::move(state), params, now);
    state.cwnd = 1;
    state.phase = Phase::SlowStart;
    state.epoch.reset();
    return state;
}

CcState reno_on_ack(CcState state, const AckInfo& ack) {
    if (state.phase == Phase::Recovery) return state;
    SegCount acked = ack.newly_acked;
    if (state.phase == Phase::SlowStart) {
        acked = slow_start(state, acked);
        if (acked <= 0) return state;
    }
    state.cwnd += acked / state.cwnd;
    return state;
}

CcState reno_on_congestion_event(CcState state) {
    state.w_max = state.cwnd;
    state.cwnd = std::max<SegCount>(1, state.cwnd / 2);
    state.ssthresh = state.cwnd;
    state.phase = Phase::CongestionAvoidance;
    return state;
}

CcState reno_on_timeout(CcState state) {
    state = reno_on_congestion_event(std::move(state));
    state.cwnd = 1;
    state.phase = Phase::SlowStart;
    return state;
}

}  // namespace roccet_lab
