#include "roccet_lab/controller.hpp"

#include <tuple>

namespace roccet_lab {

CubicController::CubicController(CubicParams params, SegCount initial_cwnd)
    : params_(params), state_(initial_cc_state(Algo::Cubic, initial_cwnd)) {
    params_.validate();
}

void CubicController::on_ack(const AckInfo& ack) {
    if (state_.phase == Phase::Recovery && !ack.in_recovery) state_.phase = Phase::CongestionAvoidance;
    if (ack.in_recovery) return;
    state_ = cubic_on_ack(std::move(state_), ack, params_);
}

bool CubicController::on_loss(LossSignal signal, SimTime now) {
    const SegCount before = state_.cwnd;
    if (signal == LossSignal::Timeout) {
        state_ = cubic_on_timeout(std::move(state_), params_, now);
    } else {
        state_ = cubic_on_congestion_event(std::move(state_), params_, now);
        state_.phase = Phase::Recovery;
    }
    log_.push_back({now, CeKind::LossCe, before, state_.cwnd});
    return true;
}

RenoController::RenoController(SegCount initial_cwnd)
    : state_(initial_cc_state(Algo::Reno, initial_cwnd)) {}

void RenoController::on_ack(const AckInfo& ack) {
    if (state_.phase == Phase::Recovery && !ack.in_recovery) state_.phase = Phase::CongestionAvoidance;
    if (ack.in_recovery) return;
    state_ = reno_on_ack(std::move(state_), ack);
}

bool RenoController::on_loss(LossSignal signal, SimTime now) {
    const SegCount before = state_.cwnd;
    if (signal == LossSignal::Timeout) {
        state_ = reno_on_timeout(std::move(state_));
    } else {
        state_ = reno_on_congestion_event(std::move(state_));
        state_.phase = Phase::Recovery;
    }
    log_.push_back({now, CeKind::LossCe, before, state_.cwnd});
    return true;
}

ProbeRateController::ProbeRateController(ProbeRateParams params, SegCount initial_cwnd)
    : params_(params), cc_(initial_cc_state(Algo::ProbeRate, initial_cwnd)) {
    params_.validate();
    probe_.pacing_gain = params_.startup_gain;
}

void ProbeRateController::on_ack(const AckInfo& ack) {
    std::tie(cc_, probe_) = probe_rate_on_ack(std::move(cc_), std::move(probe_), ack, params_);
}

bool ProbeRateController::on_loss(LossSignal signal, SimTime now) {
    // Loss is not a congestion signal for the model; only a timeout collapses the window.
    if (signal != LossSignal::Timeout) return false;
    const SegCount before = cc_.cwnd;
    cc_.cwnd = params_.probe_rtt_cwnd;
    log_.push_back({now, CeKind::LossCe, before, cc_.cwnd});
    return true;
}

std::optional<double> ProbeRateController::pacing_rate_bps() const {
    if (probe_.pacing_rate_bps <= 0) return std::nullopt;
    return probe_.pacing_rate_bps;
}

std::unique_ptr<CongestionController> make_controller(const ControllerConfig& config) {
    switch (config.algo) {
        case Algo::Reno: return std::make_unique<RenoController>(config.initial_cwnd);
        case Algo::Cubic: return std::make_unique<CubicController>(config.cubic, config.initial_cwnd);
        case Algo::Roccet:
            return std::make_unique<RoccetController>(config.roccet, config.cubic, config.initial_cwnd);
        case Algo::ProbeRate:
            return std::make_unique<ProbeRateController>(config.probe_rate, config.initial_cwnd);
    }
    throw ValidationError("unknown congestion control algorithm");
}

}  // namespace roccet_lab
