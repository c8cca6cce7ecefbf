#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "roccet_lab/cc_core.hpp"
#include "roccet_lab/scenario.hpp"

namespace roccet_lab {

struct Packet {
    int flow_id = 0;
    std::int64_t seq = 0;
    int size_bytes = 1500;
    SimTime sent_at{};
    bool is_retransmit = false;

    // Filled in by the bottleneck.
    SimTime enqueued_at{};
    std::uint64_t accept_index = 0;
};

enum class EnqueueResult { Accepted, Dropped };

/// Droptail FIFO. Occupancy counts the packet in service.
class DropTailQueue {
public:
    explicit DropTailQueue(std::int64_t capacity_segments);

    EnqueueResult enqueue(Packet pkt);
    /// Removes the head packet. Precondition: not empty.
    Packet pop();
    const Packet& front() const { return packets_.front(); }
    bool empty() const { return packets_.empty(); }

    std::int64_t capacity() const { return capacity_; }
    std::int64_t occupancy() const { return static_cast<std::int64_t>(packets_.size()); }
    std::int64_t drops() const { return drops_; }
    const std::deque<Packet>& packets() const { return packets_; }

private:
    std::int64_t capacity_;
    std::int64_t drops_ = 0;
    std::uint64_t accepted_ = 0;
    std::deque<Packet> packets_;
};

enum class EventKind {
    FlowStart,
    FlowStop,
    AppData,
    Enqueue,
    DequeueComplete,
    Deliver,
    AckDeliver,
    AckTimer,
    RtoFire,
    SendReady,
    RateChange,
    Sample,
};

std::string_view to_string(EventKind kind);

struct SimEvent {
    SimTime at;
    std::uint64_t order = 0;  // tie-breaker, assigned at scheduling time
    EventKind kind = EventKind::Sample;
    int flow = -1;  // index into the resolved flow list
    Packet pkt;
    std::int64_t ack_no = 0;
    SimTime echo{};
    std::uint64_t generation = 0;
};

struct TraceSample {
    SimTime at;
    int flow_id = 0;
    SegCount cwnd = 0;
    Duration srtt{0};
    std::int64_t delivered_bytes = 0;  // cumulative, in order at the receiver
    double goodput_mbps = 0;           // since the previous sample
    std::int64_t queue_segments = 0;   // whole bottleneck, all flows
    Phase phase = Phase::SlowStart;
};

struct FlowInfo {
    int id = 0;
    Algo algo = Algo::Cubic;
    SimTime start{};
    std::optional<SimTime> stop;
};

struct CeEvent {
    int flow_id = 0;
    CeRecord record;
};

enum class DropReason { Queue, Impairment };

std::string_view to_string(DropReason reason);

struct DropEvent {
    SimTime at;
    int flow_id = 0;
    std::int64_t seq = 0;
    DropReason reason = DropReason::Queue;
};

/// Per-flow packet accounting at the end of a run.
struct FlowAudit {
    int flow_id = 0;
    std::int64_t sent = 0;
    std::int64_t delivered = 0;  // arrivals at the receiver, duplicates included
    std::int64_t dropped = 0;
    std::int64_t in_flight = 0;  // past the queue, not yet at the receiver
    std::int64_t in_queue = 0;
    std::int64_t goodput_bytes = 0;

    bool balanced() const { return sent == delivered + dropped + in_flight + in_queue; }
};

struct TraceSet {
    nlohmann::json config;  // resolved scenario
    std::vector<FlowInfo> flows;
    std::vector<TraceSample> samples;
    std::vector<CeEvent> ce_events;
    std::vector<DropEvent> drops;
    std::vector<FlowAudit> audits;
    std::uint64_t events_processed = 0;
    SimTime end_time{};

    std::vector<TraceSample> samples_for(int flow_id) const;
    std::vector<CeEvent> ce_for(int flow_id) const;
};

struct SendObservation {
    SimTime at;
    int flow_id = 0;
    std::int64_t seq = 0;
    bool is_retransmit = false;
    bool new_data = false;
    SegCount cwnd = 0;
    std::int64_t in_flight_after = 0;
};

struct DeliverObservation {
    SimTime at;
    Packet pkt;
    SimTime service_start;
    SimTime service_end;
    Duration propagation{0};
};

/// Optional observers, used by tests.
struct SimHooks {
    std::function<void(const SendObservation&)> on_send;
    std::function<void(const DeliverObservation&)> on_deliver;
    std::function<void(int flow_id, const AckInfo&, const CcState&)> on_ack;
};

/// Runs one scenario to completion. Throws ValidationError for an invalid
/// scenario before any event is processed.
TraceSet run(const ScenarioSpec& scenario, const SimHooks& hooks = {});

/// Service time of one packet at `bits_per_second`, rounded to the clock.
Duration service_time(int size_bytes, double bits_per_second);

}  // namespace roccet_lab
