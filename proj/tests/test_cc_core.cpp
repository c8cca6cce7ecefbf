#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "roccet_lab/cc_core.hpp"
#include "roccet_lab/controller.hpp"
#include "roccet_lab/netsim.hpp"
#include "roccet_lab/probe_rate.hpp"

using namespace roccet_lab;
using namespace std::chrono_literals;

namespace {

// Direct evaluation of the growth curve, written out independently of the library.
double oracle_k(double w_max, double beta, double c) { return std::cbrt(w_max * (1.0 - beta) / c); }
double oracle_w(double t, double w_max, double beta, double c) {
    const double d = t - oracle_k(w_max, beta, c);
    return std::max(1.0, c * d * d * d + w_max);
}

AckInfo ack_at(SimTime now, SegCount acked, bool app_limited = false) {
    AckInfo a;
    a.now = now;
    a.newly_acked = acked;
    a.rtt_sample = 40ms;
    a.srtt = 40ms;
    a.is_app_limited = app_limited;
    return a;
}

CcState ca_state(SegCount cwnd, SegCount w_max) {
    CcState s = initial_cc_state(Algo::Cubic, cwnd);
    s.w_max = w_max;
    s.ssthresh = cwnd;
    s.phase = Phase::CongestionAvoidance;
    return s;
}

bool close_rel(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("cubic_k closed form") {
    CubicParams p;
    CHECK(cubic_k(100, p).count() == doctest::Approx(std::cbrt(75.0)).epsilon(1e-12));
    CHECK(cubic_k(100, p).count() == doctest::Approx(4.217).epsilon(1e-3));
    CHECK(cubic_k(0.4 / 0.3, p).count() == doctest::Approx(1.0).epsilon(1e-12));

    p.beta_mult = 1.0 - 1e-12;
    CHECK(cubic_k(1000, p).count() < 2e-3);
}

TEST_CASE("cubic_window anchors") {
    const CubicParams p;
    const Seconds k = cubic_k(100, p);
    CHECK(cubic_window(Seconds(0), 100, p) == doctest::Approx(70.0).epsilon(1e-12));
    CHECK(cubic_window(k, 100, p) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(cubic_window(2 * k, 100, p) == doctest::Approx(130.0).epsilon(1e-12));
    CHECK(cubic_window(Seconds(0), 1.0, p) >= 1.0);
}

TEST_CASE("property: continuity, saddle and symmetry over random parameters") {
    gen::Gen g(0xc0b1c);
    for (int i = 0; i < 1000; ++i) {
        CubicParams p;
        const double w_max = g.log_real(2, 1e5);
        p.beta_mult = g.real(0.05, 0.95);
        p.c_scale = g.log_real(0.01, 10);
        const Seconds k = cubic_k(w_max, p);
        const double d = g.real(0, k.count());

        CHECK(close_rel(k.count(), oracle_k(w_max, p.beta_mult, p.c_scale), 1e-12));
        const double w0 = p.c_scale * std::pow(-k.count(), 3) + w_max;
        if (w0 >= 1) CHECK(close_rel(cubic_window(Seconds(0), w_max, p), p.beta_mult * w_max, 1e-9));
        CHECK(close_rel(cubic_window(k, w_max, p), w_max, 1e-9));
        const double up = cubic_window(k + Seconds(d), w_max, p) - w_max;
        const double down = w_max - cubic_window(k - Seconds(d), w_max, p);
        if (w_max - down > 1) CHECK(std::abs(up - down) <= 1e-9 * w_max);
        CHECK(close_rel(cubic_window(k + Seconds(d), w_max, p), oracle_w(k.count() + d, w_max, p.beta_mult, p.c_scale),
                        1e-12));
    }
}

TEST_CASE("property: cubic_window is non-decreasing past K") {
    gen::Gen g(17);
    for (int i = 0; i < 200; ++i) {
        CubicParams p;
        p.beta_mult = g.real(0.1, 0.9);
        p.c_scale = g.log_real(0.05, 5);
        const double w_max = g.log_real(2, 1e4);
        const double k = cubic_k(w_max, p).count();
        double prev = cubic_window(Seconds(k), w_max, p);
        for (double t = k; t < k + 20; t += 0.25) {
            const double w = cubic_window(Seconds(t), w_max, p);
            CHECK(w >= prev);
            prev = w;
        }
    }
}

TEST_CASE("cubic_on_ack") {
    const CubicParams p;
    SUBCASE("slow start doubles per window") {
        CcState s = initial_cc_state(Algo::Cubic, 10);
        s = cubic_on_ack(s, ack_at(kSimStart + 40ms, 10), p);
        CHECK(s.cwnd == 20);
        CHECK(s.phase == Phase::SlowStart);
    }
    SUBCASE("no growth at the start of an epoch") {
        CcState s = cubic_on_congestion_event(ca_state(100, 0), p, at_seconds(5));
        CHECK(s.cwnd == doctest::Approx(70));
        s = cubic_on_ack(s, ack_at(at_seconds(5), 1), p);
        CHECK(s.cwnd == doctest::Approx(70));
    }
    SUBCASE("app-limited freeze") {
        CcState s = initial_cc_state(Algo::Cubic, 30);
        const CcState before = s;
        s = cubic_on_ack(s, ack_at(at_seconds(1), 30, true), p);
        CHECK(s.cwnd == before.cwnd);
        CHECK(s.phase == before.phase);

        CcState ca = cubic_on_congestion_event(ca_state(100, 0), p, at_seconds(1));
        const SegCount frozen = ca.cwnd;
        ca = cubic_on_ack(ca, ack_at(at_seconds(9), 50, true), p);
        CHECK(ca.cwnd == frozen);
    }
    SUBCASE("freeze off grows an app-limited flow") {
        CubicParams off = p;
        off.freeze_when_app_limited = false;
        CcState s = cubic_on_ack(initial_cc_state(Algo::Cubic, 10), ack_at(at_seconds(1), 10, true), off);
        CHECK(s.cwnd == 20);
    }
    SUBCASE("congestion avoidance step stays below the curve") {
        CcState s = cubic_on_congestion_event(ca_state(100, 0), p, kSimStart);
        for (int i = 1; i <= 2000; ++i) {
            const SimTime now = kSimStart + Duration(i * 5000);
            s = cubic_on_ack(s, ack_at(now, 1), p);
            CHECK(s.cwnd <= cubic_window(now - s.epoch->start, *s.epoch, p.c_scale) + 1e-9);
        }
        CHECK(s.cwnd > 70);
    }
}

TEST_CASE("cubic_on_congestion_event") {
    const CubicParams p;
    CcState a = cubic_on_congestion_event(ca_state(100, 80), p, at_seconds(1));
    CHECK(a.w_max == doctest::Approx(100));
    CHECK(a.cwnd == doctest::Approx(70));
    CHECK(a.ssthresh.value() == doctest::Approx(70));
    CHECK(a.phase == Phase::CongestionAvoidance);
    CHECK(a.epoch_start() == at_seconds(1));

    CcState b = cubic_on_congestion_event(ca_state(60, 80), p, at_seconds(1));
    CHECK(b.w_max == doctest::Approx(39));
    CHECK(b.cwnd == doctest::Approx(42));

    CubicParams no_fc = p;
    no_fc.fast_convergence = false;
    CHECK(cubic_on_congestion_event(ca_state(60, 80), no_fc, at_seconds(1)).w_max == doctest::Approx(60));

    CHECK(cubic_on_congestion_event(ca_state(1, 0), p, at_seconds(1)).cwnd == 1);
}

TEST_CASE("reno") {
    CcState s = initial_cc_state(Algo::Reno, 10);
    s.ssthresh = 10;
    s.phase = Phase::CongestionAvoidance;
    for (int i = 0; i < 10; ++i) s = reno_on_ack(s, ack_at(at_seconds(1), 1));
    CHECK(s.cwnd == doctest::Approx(11).epsilon(0.01));

    CcState big = initial_cc_state(Algo::Reno, 20);
    CHECK(reno_on_congestion_event(big).cwnd == 10);

    CcState one = initial_cc_state(Algo::Reno, 1);
    CHECK(reno_on_ack(one, ack_at(at_seconds(1), 1)).cwnd == 2);
}

TEST_CASE("property: cwnd never drops below one segment") {
    gen::Gen g(99);
    const CubicParams p;
    for (int run = 0; run < 200; ++run) {
        CubicController cubic(p, g.integer(1, 50));
        RenoController reno(g.integer(1, 50));
        SimTime now = kSimStart;
        for (int step = 0; step < 300; ++step) {
            now += Duration(g.integer(1, 50000));
            const int op = static_cast<int>(g.integer(0, 9));
            for (CongestionController* cc : {static_cast<CongestionController*>(&cubic), static_cast<CongestionController*>(&reno)}) {
                if (op == 0)
                    cc->on_loss(LossSignal::Timeout, now);
                else if (op <= 2)
                    cc->on_loss(LossSignal::DupAck, now);
                else
                    cc->on_ack(ack_at(now, static_cast<double>(g.integer(0, 20)), g.coin(0.2)));
                CHECK(cc->state().cwnd >= 1);
            }
        }
    }
}

TEST_CASE("property: freeze holds for any ACK sequence") {
    gen::Gen g(5);
    const CubicParams p;
    for (int run = 0; run < 100; ++run) {
        CcState s = g.coin() ? initial_cc_state(Algo::Cubic, g.real(1, 500))
                             : cubic_on_congestion_event(ca_state(g.real(2, 500), g.real(0, 500)), p, kSimStart);
        const SegCount before = s.cwnd;
        SimTime now = kSimStart;
        const auto n = g.integer(1, 400);
        for (std::int64_t i = 0; i < n; ++i) {
            now += Duration(g.integer(1, 100000));
            s = cubic_on_ack(s, ack_at(now, g.real(0, 30), true), p);
        }
        CHECK(s.cwnd == before);
    }
}

TEST_CASE("probe-rate comparator") {
    ProbeRateParams params;
    SUBCASE("startup roughly doubles per round") {
        CcState cc = initial_cc_state(Algo::ProbeRate, 10);
        ProbeRateState st;
        SimTime now = kSimStart;
        for (int round = 0; round < 4; ++round) {
            const SegCount start = cc.cwnd;
            const auto acks = static_cast<int>(start);
            for (int i = 0; i < acks; ++i) {
                AckInfo a = ack_at(now, 1);
                a.round_start = i == 0;
                // The previous round delivered a full window per RTT.
                a.delivery_rate_bps = start * 1500 * 8 / 0.040;
                std::tie(cc, st) = probe_rate_on_ack(cc, st, a, params);
            }
            now += 40ms;
            CHECK(cc.cwnd == doctest::Approx(2 * start));
        }
        CHECK(st.mode == ProbeMode::Startup);
    }
    SUBCASE("probe-RTT after a stale min RTT clamps cwnd to 4") {
        CcState cc = initial_cc_state(Algo::ProbeRate, 80);
        ProbeRateState st;
        st.mode = ProbeMode::ProbeBw;
        st.filled_pipe = true;
        st.min_rtt = 40ms;
        st.min_rtt_stamp = kSimStart;
        st.bw_samples.emplace_back(0, 10e6);
        AckInfo a = ack_at(kSimStart + 10s + 1ms, 1);
        a.rtt_sample = 55ms;
        std::tie(cc, st) = probe_rate_on_ack(cc, st, a, params);
        CHECK(st.mode == ProbeMode::ProbeRtt);
        CHECK(cc.cwnd == 4);
    }
    SUBCASE("pacing converges to the bottleneck rate") {
        ScenarioSpec s = builtin_scenario("steady");
        s.flows[0].algo = Algo::ProbeRate;
        s.horizon = 20s;
        double last_rate = 0;
        SimHooks hooks;
        hooks.on_ack = [&](int, const AckInfo& a, const CcState&) {
            if (a.now > at_seconds(15) && a.delivery_rate_bps) last_rate = *a.delivery_rate_bps;
        };
        const TraceSet t = run(s, hooks);
        CHECK(last_rate == doctest::Approx(10e6).epsilon(0.1));
        double sum = 0;
        int n = 0;
        for (const auto& smp : t.samples_for(0))
            if (smp.at >= at_seconds(10)) sum += smp.goodput_mbps, ++n;
        REQUIRE(n > 0);
        CHECK(sum / n > 0.9 * 10);
    }
}

TEST_CASE("algorithm names round-trip") {
    for (Algo a : {Algo::Reno, Algo::Cubic, Algo::Roccet, Algo::ProbeRate}) CHECK(parse_algo(to_string(a)) == a);
    CHECK_FALSE(parse_algo("bbr3").has_value());
    CubicParams bad;
    bad.beta_mult = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}
