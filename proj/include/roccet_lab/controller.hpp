#pragma once

#include <memory>
#include <vector>

#include "roccet_lab/cc_core.hpp"
#include "roccet_lab/probe_rate.hpp"
#include "roccet_lab/roccet.hpp"

namespace roccet_lab {

struct ControllerConfig {
    Algo algo = Algo::Cubic;
    CubicParams cubic;
    RoccetParams roccet;
    ProbeRateParams probe_rate;
    SegCount initial_cwnd = 10;
};

class CubicController final : public CongestionController {
public:
    explicit CubicController(CubicParams params, SegCount initial_cwnd = 10);

    Algo algo() const override { return Algo::Cubic; }
    void on_ack(const AckInfo& ack) override;
    bool on_loss(LossSignal signal, SimTime now) override;
    const CcState& state() const override { return state_; }
    std::span<const CeRecord> ce_log() const override { return log_; }

private:
    CubicParams params_;
    CcState state_;
    std::vector<CeRecord> log_;
};

class RenoController final : public CongestionController {
public:
    explicit RenoController(SegCount initial_cwnd = 10);

    Algo algo() const override { return Algo::Reno; }
    void on_ack(const AckInfo& ack) override;
    bool on_loss(LossSignal signal, SimTime now) override;
    const CcState& state() const override { return state_; }
    std::span<const CeRecord> ce_log() const override { return log_; }

private:
    CcState state_;
    std::vector<CeRecord> log_;
};

class ProbeRateController final : public CongestionController {
public:
    explicit ProbeRateController(ProbeRateParams params, SegCount initial_cwnd = 10);

    Algo algo() const override { return Algo::ProbeRate; }
    void on_ack(const AckInfo& ack) override;
    bool on_loss(LossSignal signal, SimTime now) override;
    const CcState& state() const override { return cc_; }
    std::optional<double> pacing_rate_bps() const override;
    std::span<const CeRecord> ce_log() const override { return log_; }

    const ProbeRateState& probe_state() const { return probe_; }

private:
    ProbeRateParams params_;
    CcState cc_;
    ProbeRateState probe_;
    std::vector<CeRecord> log_;
};

std::unique_ptr<CongestionController> make_controller(const ControllerConfig& config);

}  // namespace roccet_lab
