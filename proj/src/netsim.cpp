#include "roccet_lab/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <set>

#include "roccet_lab/controller.hpp"

namespace roccet_lab {

DropTailQueue::DropTailQueue(std::int64_t capacity_segments) : capacity_(capacity_segments) {
    if (capacity_ < 1) throw ValidationError("queue capacity must be >= 1 segment");
}

EnqueueResult DropTailQueue::enqueue(Packet pkt) {
    if (occupancy() >= capacity_) {
        ++drops_;
        return EnqueueResult::Dropped;
    }
    pkt.accept_index = accepted_++;
    packets_.push_back(pkt);
    return EnqueueResult::Accepted;
}

Packet DropTailQueue::pop() {
    Packet p = packets_.front();
    packets_.pop_front();
    return p;
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::FlowStart: return "FlowStart";
        case EventKind::FlowStop: return "FlowStop";
        case EventKind::AppData: return "AppData";
        case EventKind::Enqueue: return "Enqueue";
        case EventKind::DequeueComplete: return "DequeueComplete";
        case EventKind::Deliver: return "Deliver";
        case EventKind::AckDeliver: return "AckDeliver";
        case EventKind::AckTimer: return "AckTimer";
        case EventKind::RtoFire: return "RtoFire";
        case EventKind::SendReady: return "SendReady";
        case EventKind::RateChange: return "RateChange";
        case EventKind::Sample: return "Sample";
    }
    return "?";
}

std::string_view to_string(DropReason reason) {
    return reason == DropReason::Queue ? "queue" : "impairment";
}

std::vector<TraceSample> TraceSet::samples_for(int flow_id) const {
    std::vector<TraceSample> out;
    for (const auto& s : samples)
        if (s.flow_id == flow_id) out.push_back(s);
    return out;
}

std::vector<CeEvent> TraceSet::ce_for(int flow_id) const {
    std::vector<CeEvent> out;
    for (const auto& e : ce_events)
        if (e.flow_id == flow_id) out.push_back(e);
    return out;
}

Duration service_time(int size_bytes, double bits_per_second) {
    return Duration(std::max<std::int64_t>(1, std::llround(size_bytes * 8.0 / bits_per_second * 1e6)));
}

namespace {

constexpr Duration kMinRto = std::chrono::milliseconds(200);
constexpr Duration kMaxRto = std::chrono::seconds(60);
constexpr Duration kInitialRto = std::chrono::seconds(1);
constexpr Duration kDelayedAckTimeout = std::chrono::milliseconds(40);
constexpr std::int64_t kUnlimited = std::numeric_limits<std::int64_t>::max();

struct SegMeta {
    SimTime sent_at;
    bool retransmitted = false;
    std::int64_t delivered_at_send = 0;
    SimTime delivered_time_at_send;
};

struct Flow {
    ResolvedFlow spec;
    std::unique_ptr<CongestionController> cc;

    bool started = false;
    bool stopped = false;  // application produces no more data
    std::int64_t app_end = 0;

    // Sender
    std::int64_t snd_una = 0;
    std::int64_t snd_nxt = 0;
    std::int64_t max_sent = 0;
    std::deque<SegMeta> meta;  // meta[i] describes seq snd_una + i
    int dupacks = 0;
    std::int64_t sacked_out = 0;
    bool in_recovery = false;
    std::int64_t recover = 0;
    bool partial_ack_seen = false;

    std::optional<double> srtt_us;
    double rttvar_us = 0;
    Duration rto = kInitialRto;
    std::optional<SimTime> rto_deadline;
    std::optional<SimTime> rto_event_at;

    std::int64_t delivered = 0;
    SimTime delivered_time{};
    std::int64_t next_round_delivered = 0;

    // Linux cwnd-limited tracking
    bool is_cwnd_limited = false;
    std::int64_t max_packets_out = 0;
    std::int64_t cwnd_usage_seq = 0;

    SimTime next_send_time{};
    bool send_ready_pending = false;

    // Receiver
    std::int64_t rcv_nxt = 0;
    std::set<std::int64_t> out_of_order;
    bool ack_pending = false;
    SimTime pending_echo{};
    std::uint64_t ack_timer_gen = 0;

    // Accounting
    std::int64_t sent = 0;
    std::int64_t arrived = 0;
    std::int64_t dropped = 0;
    std::int64_t last_sample_bytes = 0;

    std::int64_t packets_out() const { return snd_nxt - snd_una; }
    std::int64_t in_flight() const { return std::max<std::int64_t>(0, packets_out() - sacked_out); }
    bool done() const { return stopped && snd_una >= app_end; }
};

class Simulator {
public:
    Simulator(const ScenarioSpec& spec, const SimHooks& hooks)
        : spec_(spec),
          hooks_(hooks),
          queue_(spec.queue_capacity_segments()),
          rng_(spec.seed),
          mtu_(spec.link.mtu_bytes),
          prop_(spec.link.prop_delay_one_way),
          rate_bps_(spec.link.initial_rate_bps()),
          forced_drops_(spec.impairment.forced_drops) {
        std::sort(forced_drops_.begin(), forced_drops_.end());
        for (auto& r : resolve_flows(spec)) {
            ControllerConfig cfg;
            cfg.algo = r.algo;
            cfg.cubic = r.cubic;
            cfg.roccet = spec.roccet;
            cfg.probe_rate = spec.probe_rate;
            cfg.probe_rate.segment_bytes = mtu_;
            Flow f;
            f.spec = r;
            f.cc = make_controller(cfg);
            flows_.push_back(std::move(f));
        }
    }

    TraceSet run() {
        trace_.config = to_json(spec_);
        const SimTime horizon = kSimStart + spec_.horizon;
        std::mt19937_64 start_rng(spec_.seed ^ 0x9e3779b97f4a7c15ULL);
        for (std::size_t i = 0; i < flows_.size(); ++i) {
            auto& src = flows_[i].spec.source;
            if (spec_.start_jitter > Duration::zero())
                src.start_at += Duration(static_cast<std::int64_t>(
                    start_rng() % static_cast<std::uint64_t>(spec_.start_jitter.count() + 1)));
            FlowInfo info{flows_[i].spec.id, flows_[i].spec.algo, src.start_at, std::nullopt};
            if (src.duration) info.stop = src.start_at + *src.duration;
            trace_.flows.push_back(info);
            schedule(src.start_at, EventKind::FlowStart, static_cast<int>(i));
            if (info.stop) schedule(*info.stop, EventKind::FlowStop, static_cast<int>(i));
        }
        for (std::size_t i = 1; i < spec_.link.rate_schedule.size(); ++i) {
            SimEvent e = make(spec_.link.rate_schedule[i].at, EventKind::RateChange, -1);
            e.generation = i;
            push(std::move(e));
        }
        schedule(kSimStart + spec_.sample_interval, EventKind::Sample, -1);

        SimTime now = kSimStart;
        while (!heap_.empty() && heap_.front().at < horizon) {
            std::pop_heap(heap_.begin(), heap_.end(), later);
            SimEvent e = std::move(heap_.back());
            heap_.pop_back();
            now = e.at;
            ++trace_.events_processed;
            dispatch(e);
            if (all_done()) break;
        }
        if (!all_done()) now = horizon;
        trace_.end_time = now;
        if (trace_.samples.empty() || trace_.samples.back().at != now) take_samples(now);
        finish();
        return std::move(trace_);
    }

private:
    static bool later(const SimEvent& a, const SimEvent& b) {
        return a.at != b.at ? a.at > b.at : a.order > b.order;
    }

    SimEvent make(SimTime at, EventKind kind, int flow) {
        SimEvent e;
        e.at = at;
        e.kind = kind;
        e.flow = flow;
        return e;
    }

    void push(SimEvent e) {
        e.order = next_order_++;
        heap_.push_back(std::move(e));
        std::push_heap(heap_.begin(), heap_.end(), later);
    }

    void schedule(SimTime at, EventKind kind, int flow) { push(make(at, kind, flow)); }

    bool all_done() const {
        return std::all_of(flows_.begin(), flows_.end(), [](const Flow& f) { return f.started && f.done(); });
    }

    void dispatch(const SimEvent& e) {
        switch (e.kind) {
            case EventKind::FlowStart: on_flow_start(e); break;
            case EventKind::FlowStop: on_flow_stop(e); break;
            case EventKind::AppData: on_app_data(e); break;
            case EventKind::Enqueue: on_enqueue(e); break;
            case EventKind::DequeueComplete: on_dequeue_complete(e); break;
            case EventKind::Deliver: on_deliver(e); break;
            case EventKind::AckDeliver: on_ack(e); break;
            case EventKind::AckTimer: on_ack_timer(e); break;
            case EventKind::RtoFire: on_rto_event(e); break;
            case EventKind::SendReady:
                flows_[e.flow].send_ready_pending = false;
                try_send(e.flow, e.at);
                break;
            case EventKind::RateChange: rate_bps_ = spec_.link.rate_schedule[e.generation].bits_per_second; break;
            case EventKind::Sample:
                take_samples(e.at);
                schedule(e.at + spec_.sample_interval, EventKind::Sample, -1);
                break;
        }
    }

    // --- application -------------------------------------------------------

    Duration app_interval(const Flow& f) const { return service_time(mtu_, f.spec.source.app_rate_bps); }

    void on_flow_start(const SimEvent& e) {
        Flow& f = flows_[e.flow];
        f.started = true;
        f.delivered_time = e.at;
        f.next_send_time = e.at;
        if (f.spec.source.kind == SourceKind::Greedy) {
            f.app_end = kUnlimited;
        } else {
            f.app_end = 1;
            schedule(e.at + app_interval(f), EventKind::AppData, e.flow);
        }
        try_send(e.flow, e.at);
    }

    void on_flow_stop(const SimEvent& e) {
        Flow& f = flows_[e.flow];
        f.stopped = true;
        f.app_end = std::min(f.app_end, f.snd_nxt);
        f.app_end = std::max(f.app_end, f.max_sent);
    }

    void on_app_data(const SimEvent& e) {
        Flow& f = flows_[e.flow];
        if (f.stopped) return;
        ++f.app_end;
        schedule(e.at + app_interval(f), EventKind::AppData, e.flow);
        try_send(e.flow, e.at);
    }

    // --- sender ------------------------------------------------------------

    SegMeta& meta_for(Flow& f, std::int64_t seq) {
        const auto idx = static_cast<std::size_t>(seq - f.snd_una);
        while (f.meta.size() <= idx) f.meta.push_back({});
        return f.meta[idx];
    }

    void transmit(int flow_idx, std::int64_t seq, SimTime now, bool new_data) {
        Flow& f = flows_[flow_idx];
        Packet p;
        p.flow_id = f.spec.id;
        p.seq = seq;
        p.size_bytes = mtu_;
        p.sent_at = now;
        p.is_retransmit = seq < f.max_sent;
        SegMeta& m = meta_for(f, seq);
        m.sent_at = now;
        m.retransmitted = m.retransmitted || p.is_retransmit;
        m.delivered_at_send = f.delivered;
        m.delivered_time_at_send = f.delivered_time;
        f.max_sent = std::max(f.max_sent, seq + 1);
        ++f.sent;
        if (new_data) ++f.snd_nxt;
        if (!f.rto_deadline) arm_rto(flow_idx, now);
        if (hooks_.on_send)
            hooks_.on_send({now, f.spec.id, seq, p.is_retransmit, new_data, f.cc->state().cwnd, f.in_flight()});
        SimEvent e = make(now, EventKind::Enqueue, flow_idx);
        e.pkt = p;
        push(std::move(e));
    }

    void try_send(int flow_idx, SimTime now) {
        Flow& f = flows_[flow_idx];
        if (!f.started) return;
        bool cwnd_limited = false;
        bool sent_any = false;
        while (true) {
            if (f.snd_nxt >= f.app_end) break;
            const auto& sndbuf = f.spec.source.send_buffer_segments;
            if (sndbuf && f.snd_nxt >= f.snd_una + *sndbuf) break;
            const auto window = static_cast<std::int64_t>(std::floor(f.cc->state().cwnd));
            if (f.in_flight() >= window) {
                cwnd_limited = true;
                break;
            }
            if (const auto pacing = f.cc->pacing_rate_bps()) {
                if (now < f.next_send_time) {
                    if (!f.send_ready_pending) {
                        f.send_ready_pending = true;
                        schedule(f.next_send_time, EventKind::SendReady, flow_idx);
                    }
                    break;
                }
                f.next_send_time = now + service_time(mtu_, *pacing);
            }
            transmit(flow_idx, f.snd_nxt, now, true);
            sent_any = true;
        }
        cwnd_limited =
            cwnd_limited || f.in_flight() >= static_cast<std::int64_t>(std::floor(f.cc->state().cwnd));
        if (sent_any || cwnd_limited) validate_cwnd(f, cwnd_limited);
    }

    static void validate_cwnd(Flow& f, bool cwnd_limited) {
        if (f.snd_una >= f.cwnd_usage_seq || cwnd_limited ||
            (!f.is_cwnd_limited && f.packets_out() > f.max_packets_out)) {
            f.is_cwnd_limited = cwnd_limited;
            f.max_packets_out = f.packets_out();
            f.cwnd_usage_seq = f.snd_nxt;
        }
    }

    static bool cwnd_limited_now(const Flow& f) {
        const CcState& s = f.cc->state();
        if (s.phase == Phase::SlowStart) return s.cwnd < 2.0 * static_cast<double>(f.max_packets_out);
        return f.is_cwnd_limited;
    }

    void arm_rto(int flow_idx, SimTime now) {
        Flow& f = flows_[flow_idx];
        f.rto_deadline = now + f.rto;
        if (!f.rto_event_at || *f.rto_event_at > *f.rto_deadline) {
            f.rto_event_at = f.rto_deadline;
            schedule(*f.rto_deadline, EventKind::RtoFire, flow_idx);
        }
    }

    void update_rtt(Flow& f, Duration sample) {
        const double r = static_cast<double>(sample.count());
        if (!f.srtt_us) {
            f.srtt_us = r;
            f.rttvar_us = r / 2;
        } else {
            f.rttvar_us = 0.75 * f.rttvar_us + 0.25 * std::abs(*f.srtt_us - r);
            f.srtt_us = 0.875 * *f.srtt_us + 0.125 * r;
        }
        const Duration rto(std::llround(*f.srtt_us + 4 * f.rttvar_us));
        f.rto = std::clamp(rto, kMinRto, kMaxRto);
    }

    static Duration srtt_of(const Flow& f) {
        return f.srtt_us ? Duration(std::llround(*f.srtt_us)) : Duration::zero();
    }

    void on_ack(const SimEvent& e) {
        Flow& f = flows_[e.flow];
        const SimTime now = e.at;
        const std::int64_t ack_no = e.ack_no;
        if (ack_no > f.snd_una) {
            const std::int64_t newly = ack_no - f.snd_una;
            const SegMeta last = meta_for(f, ack_no - 1);
            const Duration rtt = now - e.echo;
            update_rtt(f, rtt);

            f.delivered += newly;
            f.delivered_time = now;
            bool round_start = false;
            if (last.delivered_at_send >= f.next_round_delivered) {
                round_start = true;
                f.next_round_delivered = f.delivered;
            }
            std::optional<double> rate;
            const Duration interval = now - last.delivered_time_at_send;
            if (!last.retransmitted && interval > Duration::zero())
                rate = static_cast<double>(f.delivered - last.delivered_at_send) * mtu_ * 8.0 / to_seconds(interval);

            const auto drop = static_cast<std::size_t>(std::min<std::int64_t>(newly, std::ssize(f.meta)));
            f.meta.erase(f.meta.begin(), f.meta.begin() + static_cast<std::ptrdiff_t>(drop));
            f.snd_una = ack_no;
            if (f.snd_nxt < f.snd_una) f.snd_nxt = f.snd_una;
            f.dupacks = 0;

            bool in_recovery = false;
            bool rearm = true;
            if (f.in_recovery) {
                if (ack_no >= f.recover) {
                    f.in_recovery = false;
                    f.sacked_out = 0;
                } else {
                    in_recovery = true;
                    f.sacked_out = std::max<std::int64_t>(0, f.sacked_out - (newly - 1));
                    transmit(e.flow, f.snd_una, now, false);
                    rearm = !f.partial_ack_seen;
                    f.partial_ack_seen = true;
                }
            } else {
                f.sacked_out = 0;
            }
            if (f.snd_una >= f.max_sent) {
                f.rto_deadline.reset();
            } else if (rearm) {
                arm_rto(e.flow, now);
            }

            AckInfo info;
            info.newly_acked = static_cast<SegCount>(newly);
            info.rtt_sample = rtt;
            info.now = now;
            info.is_app_limited = !cwnd_limited_now(f);
            info.srtt = srtt_of(f);
            info.round_start = round_start;
            info.in_recovery = in_recovery;
            info.in_flight = static_cast<SegCount>(f.in_flight());
            info.delivery_rate_bps = rate;
            f.cc->on_ack(info);
            if (hooks_.on_ack) hooks_.on_ack(f.spec.id, info, f.cc->state());
        } else if (ack_no == f.snd_una && f.max_sent > f.snd_una) {
            ++f.dupacks;
            f.sacked_out = std::min<std::int64_t>(f.sacked_out + 1, std::max<std::int64_t>(0, f.packets_out() - 1));
            // Early retransmit for small windows: a lower threshold when fewer
            // than four segments are outstanding.
            const std::int64_t outstanding = f.max_sent - f.snd_una;
            const int threshold = outstanding >= 2 && outstanding < 4 ? static_cast<int>(outstanding - 1) : 3;
            if (f.dupacks == threshold && !f.in_recovery && f.snd_una >= f.recover) {
                f.in_recovery = true;
                f.partial_ack_seen = false;
                f.recover = f.max_sent;
                f.cc->on_loss(LossSignal::DupAck, now);
                transmit(e.flow, f.snd_una, now, false);
            }
        }
        try_send(e.flow, now);
    }

    void on_rto_event(const SimEvent& e) {
        Flow& f = flows_[e.flow];
        f.rto_event_at.reset();
        if (!f.rto_deadline) return;
        if (e.at < *f.rto_deadline) {
            f.rto_event_at = f.rto_deadline;
            schedule(*f.rto_deadline, EventKind::RtoFire, e.flow);
            return;
        }
        f.rto_deadline.reset();
        if (f.snd_una >= f.max_sent) return;
        f.cc->on_loss(LossSignal::Timeout, e.at);
        f.rto = std::min(f.rto * 2, kMaxRto);
        f.in_recovery = false;
        f.dupacks = 0;
        f.sacked_out = 0;
        f.recover = f.max_sent;
        f.snd_nxt = f.snd_una;  // go-back-N
        for (auto& m : f.meta) m.retransmitted = true;
        try_send(e.flow, e.at);
        if (!f.rto_deadline) arm_rto(e.flow, e.at);
    }

    // --- bottleneck ----------------------------------------------------------

    bool impairment_drop(SimTime now) {
        const Impairment& imp = spec_.impairment;
        if (next_forced_ < forced_drops_.size() && now >= forced_drops_[next_forced_]) {
            ++next_forced_;
            return true;
        }
        if (imp.drop_probability > 0 && imp.active_at(now)) return uniform() < imp.drop_probability;
        return false;
    }

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    void on_enqueue(const SimEvent& e) {
        Packet p = e.pkt;
        Flow& f = flows_[e.flow];
        if (impairment_drop(e.at)) {
            ++f.dropped;
            trace_.drops.push_back({e.at, p.flow_id, p.seq, DropReason::Impairment});
            return;
        }
        p.enqueued_at = e.at;
        const bool was_idle = queue_.empty();
        if (queue_.enqueue(p) == EnqueueResult::Dropped) {
            ++f.dropped;
            trace_.drops.push_back({e.at, p.flow_id, p.seq, DropReason::Queue});
            return;
        }
        if (was_idle) start_service(e.at);
    }

    void start_service(SimTime now) {
        service_start_ = now;
        schedule(now + service_time(queue_.front().size_bytes, rate_bps_), EventKind::DequeueComplete, -1);
    }

    void on_dequeue_complete(const SimEvent& e) {
        const Packet p = queue_.pop();
        Duration prop = prop_;
        const Impairment& imp = spec_.impairment;
        if (imp.jitter_max > Duration::zero() && imp.active_at(e.at))
            prop += Duration(static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(imp.jitter_max.count() + 1)));
        if (hooks_.on_deliver) hooks_.on_deliver({e.at + prop, p, service_start_, e.at, prop});
        SimEvent d = make(e.at + prop, EventKind::Deliver, index_of(p.flow_id));
        d.pkt = p;
        push(std::move(d));
        if (!queue_.empty()) start_service(e.at);
    }

    int index_of(int flow_id) const {
        for (std::size_t i = 0; i < flows_.size(); ++i)
            if (flows_[i].spec.id == flow_id) return static_cast<int>(i);
        return -1;
    }

    // --- receiver ----------------------------------------------------------

    void send_ack(int flow_idx, SimTime now, SimTime echo) {
        Flow& f = flows_[flow_idx];
        f.ack_pending = false;
        SimEvent a = make(now + prop_, EventKind::AckDeliver, flow_idx);
        a.ack_no = f.rcv_nxt;
        a.echo = echo;
        push(std::move(a));
    }

    void on_deliver(const SimEvent& e) {
        Flow& f = flows_[e.flow];
        ++f.arrived;
        const std::int64_t seq = e.pkt.seq;
        bool in_order = false;
        if (seq == f.rcv_nxt) {
            in_order = f.out_of_order.empty();
            ++f.rcv_nxt;
            while (!f.out_of_order.empty() && *f.out_of_order.begin() == f.rcv_nxt) {
                f.out_of_order.erase(f.out_of_order.begin());
                ++f.rcv_nxt;
            }
        } else if (seq > f.rcv_nxt) {
            f.out_of_order.insert(seq);
        }
        if (spec_.delayed_ack && in_order && !f.ack_pending) {
            f.ack_pending = true;
            f.pending_echo = e.pkt.sent_at;
            SimEvent t = make(e.at + kDelayedAckTimeout, EventKind::AckTimer, e.flow);
            t.generation = ++f.ack_timer_gen;
            push(std::move(t));
            return;
        }
        send_ack(e.flow, e.at, e.pkt.sent_at);
    }

    void on_ack_timer(const SimEvent& e) {
        Flow& f = flows_[e.flow];
        if (f.ack_pending && e.generation == f.ack_timer_gen) send_ack(e.flow, e.at, f.pending_echo);
    }

    // --- output ------------------------------------------------------------

    void take_samples(SimTime now) {
        const Duration since = now - last_sample_at_;
        for (auto& f : flows_) {
            if (!f.started) continue;
            TraceSample s;
            s.at = now;
            s.flow_id = f.spec.id;
            s.cwnd = f.cc->state().cwnd;
            s.srtt = srtt_of(f);
            s.delivered_bytes = f.rcv_nxt * mtu_;
            s.goodput_mbps = since > Duration::zero()
                                 ? static_cast<double>(s.delivered_bytes - f.last_sample_bytes) * 8.0 /
                                       to_seconds(since) / 1e6
                                 : 0.0;
            s.queue_segments = queue_.occupancy();
            s.phase = f.cc->state().phase;
            f.last_sample_bytes = s.delivered_bytes;
            trace_.samples.push_back(s);
        }
        last_sample_at_ = now;
    }

    void finish() {
        for (std::size_t i = 0; i < flows_.size(); ++i) {
            Flow& f = flows_[i];
            for (const auto& rec : f.cc->ce_log()) trace_.ce_events.push_back({f.spec.id, rec});
            FlowAudit a;
            a.flow_id = f.spec.id;
            a.sent = f.sent;
            a.delivered = f.arrived;
            a.dropped = f.dropped;
            for (const auto& p : queue_.packets())
                if (p.flow_id == f.spec.id) ++a.in_queue;
            for (const auto& ev : heap_) {
                if (ev.flow != static_cast<int>(i)) continue;
                if (ev.kind == EventKind::Deliver || ev.kind == EventKind::Enqueue) ++a.in_flight;
            }
            a.goodput_bytes = f.rcv_nxt * mtu_;
            trace_.audits.push_back(a);
        }
        std::stable_sort(trace_.ce_events.begin(), trace_.ce_events.end(), [](const auto& a, const auto& b) {
            return a.record.at != b.record.at ? a.record.at < b.record.at : a.flow_id < b.flow_id;
        });
    }

    const ScenarioSpec& spec_;
    const SimHooks& hooks_;
    DropTailQueue queue_;
    std::mt19937_64 rng_;
    int mtu_;
    Duration prop_;
    double rate_bps_;
    std::vector<SimTime> forced_drops_;
    std::size_t next_forced_ = 0;
    SimTime service_start_{};
    SimTime last_sample_at_{};

    std::vector<Flow> flows_;
    std::vector<SimEvent> heap_;
    std::uint64_t next_order_ = 0;
    TraceSet trace_;
};

}  // namespace

TraceSet run(const ScenarioSpec& scenario, const SimHooks& hooks) {
    if (scenario.flows.empty()) {
        TraceSet empty;
        empty.config = to_json(scenario);
        return empty;
    }
    scenario.validate();
    return Simulator(scenario, hooks).run();
}

}  // namespace roccet_lab
