#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "roccet_lab/units.hpp"

namespace roccet_lab {

/// Raised for invalid parameters, scenarios and CLI input.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algo { Reno, Cubic, Roccet, ProbeRate };

std::string_view to_string(Algo algo);
std::optional<Algo> parse_algo(std::string_view name);

enum class Phase { SlowStart, CongestionAvoidance, Recovery };

std::string_view to_string(Phase phase);

/// CUBIC growth-curve constants. `beta_mult` is the fraction of the window
/// that survives a congestion event.
struct CubicParams {
    double c_scale = 0.4;
    double beta_mult = 0.7;
    bool fast_convergence = true;
    // Linux only grows cwnd while the flow is cwnd-limited.
    bool freeze_when_app_limited = true;

    void validate() const;
};

/// One CUBIC epoch: W(t) = origin + C * (t - K)^3, t measured from `start`.
struct CubicEpoch {
    SimTime start;
    SegCount origin = 0;
    Seconds k{0.0};
};

struct CcState {
    SegCount cwnd = 10;
    std::optional<SegCount> ssthresh;  // unset means infinite
    SegCount w_max = 0;
    std::optional<CubicEpoch> epoch;
    Phase phase = Phase::SlowStart;
    Algo algo = Algo::Cubic;

    std::optional<SimTime> epoch_start() const {
        return epoch ? std::optional<SimTime>(epoch->start) : std::nullopt;
    }
};

CcState initial_cc_state(Algo algo, SegCount initial_cwnd = 10);

/// What the transport tells the controller about one cumulative ACK.
struct AckInfo {
    SegCount newly_acked = 0;
    Duration rtt_sample{0};
    SimTime now{};
    bool is_app_limited = false;

    // Transport-smoothed RTT (1/8 EWMA) including this sample.
    Duration srtt{0};
    // First ACK of a new ACK-clocked round.
    bool round_start = false;
    bool in_recovery = false;
    SegCount in_flight = 0;
    std::optional<double> delivery_rate_bps;
};

enum class CeKind { RoccetCe, LossCe, LaunchExit };

std::string_view to_string(CeKind kind);
std::optional<CeKind> parse_ce_kind(std::string_view name);

struct CeRecord {
    SimTime at;
    CeKind kind;
    SegCount cwnd_before = 0;
    SegCount cwnd_after = 0;
};

enum class LossSignal { DupAck, Timeout };

// ---------------------------------------------------------------------------
// CUBIC

/// Time from a reduction to the saddle point for a window that was cut to
/// beta_mult * w_max: K = cbrt(w_max * (1 - beta_mult) / C).
Seconds cubic_k(SegCount w_max, const CubicParams& params);

/// Same curve, anchored at an arbitrary post-reduction window.
Seconds cubic_k(SegCount w_max, SegCount cwnd_after, double c_scale);

/// W(t) = C (t - K)^3 + w_max with K = cubic_k(w_max, params), floored at 1.
SegCount cubic_window(Seconds t_since_epoch, SegCount w_max, const CubicParams& params);

SegCount cubic_window(Seconds t_since_epoch, const CubicEpoch& epoch, double c_scale);

/// Starts a growth epoch at `now` from the current cwnd toward state.w_max.
CubicEpoch start_cubic_epoch(const CcState& state, SimTime now, const CubicParams& params);

CcState cubic_on_ack(CcState state, const AckInfo& ack, const CubicParams& params);
CcState cubic_on_congestion_event(CcState state, const CubicParams& params, SimTime now);
/// RTO: the congestion-event bookkeeping, then a one-segment loss window.
CcState cubic_on_timeout(CcState state, const CubicParams& params, SimTime now);

// ---------------------------------------------------------------------------
// Reno

CcState reno_on_ack(CcState state, const AckInfo& ack);
CcState reno_on_congestion_event(CcState state);
CcState reno_on_timeout(CcState state);

// ---------------------------------------------------------------------------

/// Pluggable per-flow congestion controller. One instance per flow; owned by
/// a single event loop.
class CongestionController {
public:
    virtual ~CongestionController() = default;

    virtual Algo algo() const = 0;
    virtual void on_ack(const AckInfo& ack) = 0;
    /// Returns true when the signal produced a window reduction.
    virtual bool on_loss(LossSignal signal, SimTime now) = 0;
    virtual const CcState& state() const = 0;
    virtual std::optional<double> pacing_rate_bps() const { return std::nullopt; }
    virtual std::span<const CeRecord> ce_log() const = 0;
};

}  // namespace roccet_lab
