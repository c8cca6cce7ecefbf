#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "gen.hpp"
#include "roccet_lab/metrics.hpp"

using namespace roccet_lab;
using namespace std::chrono_literals;

namespace {

// Synthetic trace: each flow delivers at a constant rate from t = 0 to 10 s.
TraceSet constant_rates(const std::vector<std::pair<int, double>>& id_and_mbps) {
    TraceSet t;
    t.end_time = at_seconds(10);
    for (const auto& [id, mbps] : id_and_mbps) t.flows.push_back({id, Algo::Roccet, kSimStart, std::nullopt});
    for (int k = 1; k <= 100; ++k) {
        const SimTime at = kSimStart + k * 100ms;
        for (const auto& [id, mbps] : id_and_mbps) {
            TraceSample s;
            s.at = at;
            s.flow_id = id;
            s.delivered_bytes = static_cast<std::int64_t>(mbps * 1e6 / 8 * 0.1) * k;
            s.goodput_mbps = mbps;
            s.srtt = 40ms + Duration(k * 100);
            t.samples.push_back(s);
        }
    }
    return t;
}

double naive_jain(const std::vector<double>& x) {
    double s = 0, q = 0;
    for (double v : x) s += v, q += v * v;
    return s * s / (static_cast<double>(x.size()) * q);
}

ScenarioSpec solo(Algo algo, double bdp) {
    ScenarioSpec s = builtin_scenario("steady");
    s.buffer_bdp_multiplier = bdp;
    s.horizon = 30s;
    s.flows[0].algo = algo;
    return s;
}

}  // namespace

TEST_CASE("jain index") {
    const std::vector<double> one{3.0};
    CHECK(jain_index(one) == 1.0);
    const std::vector<double> equal(7, 2.5);
    CHECK(jain_index(equal) == 1.0);
    const std::vector<double> hog{1, 0, 0, 0};
    CHECK(jain_index(hog) == doctest::Approx(0.25));
    CHECK_THROWS_AS(jain_index(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(jain_index(std::vector<double>{0, 0}), ValidationError);

    gen::Gen g(8);
    for (int i = 0; i < 1000; ++i) {
        const auto n = static_cast<std::size_t>(g.integer(1, 40));
        auto x = g.reals(n, 0, 100);
        if (g.coin(0.2)) x[0] = 0;
        x.back() += 1e-3;
        const double j = jain_index(x);
        CHECK(j >= 1.0 / static_cast<double>(n) - 1e-12);
        CHECK(j <= 1.0 + 1e-12);
        CHECK(j == doctest::Approx(naive_jain(x)).epsilon(1e-12));
    }
}

TEST_CASE("bandwidth share on synthetic traces") {
    const TraceSet single = constant_rates({{0, 8}});
    const ShareReport r = bandwidth_share(single, default_window(single));
    CHECK(r.fraction_of(0) == 1.0);
    CHECK(r.jain == 1.0);

    const TraceSet three = constant_rates({{0, 2}, {1, 2}, {2, 4}});
    const ShareReport s = bandwidth_share(three, default_window(three));
    CHECK(s.fraction_of(2) == doctest::Approx(0.5));
    CHECK(s.fraction_of(0) == doctest::Approx(0.25));
    CHECK(s.jain == doctest::Approx(naive_jain({2, 2, 4})));
    double sum = 0;
    for (const auto& [id, f] : s.fractions) sum += f;
    CHECK(sum <= 1.0 + 1e-12);

    CHECK_THROWS_AS(bandwidth_share(three, Window{at_seconds(5), at_seconds(5)}), ValidationError);
    CHECK_THROWS_AS(bandwidth_share(three, Window{at_seconds(20), at_seconds(30)}), ValidationError);
}

TEST_CASE("property: share fractions are permutation-equivariant") {
    gen::Gen g(21);
    for (int i = 0; i < 200; ++i) {
        const auto n = static_cast<int>(g.integer(1, 8));
        std::vector<std::pair<int, double>> flows;
        for (int k = 0; k < n; ++k) flows.emplace_back(k, g.real(0.1, 50));
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), std::mt19937_64(static_cast<std::uint64_t>(i)));
        auto relabeled = flows;
        for (int k = 0; k < n; ++k) relabeled[k].first = perm[k];

        const TraceSet a = constant_rates(flows);
        const TraceSet b = constant_rates(relabeled);
        const ShareReport ra = bandwidth_share(a, default_window(a));
        const ShareReport rb = bandwidth_share(b, default_window(b));
        for (int k = 0; k < n; ++k) CHECK(ra.fraction_of(k) == rb.fraction_of(perm[k]));
        CHECK(ra.jain == doctest::Approx(rb.jain).epsilon(1e-12));
    }
}

TEST_CASE("default window skips the first tenth") {
    const Window w = default_window(at_seconds(120));
    CHECK(w.from == at_seconds(12));
    CHECK(w.to > at_seconds(120));
}

TEST_CASE("harm") {
    CHECK(harm(10, 10) == 0.0);
    CHECK(harm(10, 6) == doctest::Approx(0.4));
    CHECK(harm(10, 12) == 0.0);
    CHECK_THROWS_AS(harm(0, 3), ValidationError);
}

TEST_CASE("nearest-rank percentiles") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
    CHECK(nearest_rank(v, 50) == 50);
    CHECK(nearest_rank(v, 25) == 25);
    CHECK(nearest_rank(v, 75) == 75);
    CHECK(nearest_rank(v, 100) == 100);
    CHECK(nearest_rank(v, 0) == 1);
    CHECK(nearest_rank({4, 1, 3, 2, 5}, 40) == 2);

    const Distribution d = distribution(std::vector<double>(13, 7.5));
    CHECK(d.p25 == 7.5);
    CHECK(d.p50 == 7.5);
    CHECK(d.max == 7.5);
    CHECK_THROWS_AS(nearest_rank({}, 50), ValidationError);
}

TEST_CASE("trace goodput matches the conservation audit exactly") {
    ScenarioSpec s = builtin_scenario("fairness-10x40");
    s.horizon = 20s;
    const TraceSet t = run(s);
    const Window everything{kSimStart, t.end_time + 1us};
    double total_bytes = 0;
    for (const auto& a : t.audits) {
        const FlowMetrics m = flow_metrics(t, a.flow_id, everything);
        CHECK(m.bytes_in_window == a.goodput_bytes);
        for (std::size_t k = 1; k < m.goodput_series.size(); ++k)
            CHECK(m.goodput_series[k - 1].first <= m.goodput_series[k].first);
        total_bytes += static_cast<double>(m.bytes_in_window);
    }
    CHECK(total_bytes * 8 / 20.0 <= 10e6);
}

TEST_CASE("two ROCCET flows starting together share evenly") {
    ScenarioSpec s = builtin_scenario("fairness-10x40");
    s.flows[1].algo = Algo::Roccet;
    s.flows[1].source.start_at = kSimStart;
    s.start_jitter = Duration::zero();
    const TraceSet t = run(s);
    const ShareReport r = bandwidth_share(t, default_window(t));
    CHECK(r.fraction_of(0) == doctest::Approx(0.5).epsilon(0.1));
    CHECK(r.jain > 0.9);
}

TEST_CASE("deep buffer: ROCCET p75 sRTT below CUBIC p25 sRTT") {
    const TraceSet roccet = run(solo(Algo::Roccet, 16));
    const TraceSet cubic = run(solo(Algo::Cubic, 16));
    const auto r = summarize(roccet, default_window(roccet)).at(0);
    const auto c = summarize(cubic, default_window(cubic)).at(0);
    CHECK(r.srtt_ms.p75 < c.srtt_ms.p25);
}

TEST_CASE("summary table and JSON") {
    const TraceSet t = constant_rates({{0, 2}, {1, 6}});
    const auto rows = summarize(t, default_window(t));
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].goodput_mbps.p50 == 6);
    const std::string table = format_table(rows);
    std::istringstream lines(table);
    std::string line;
    std::size_t width = 0;
    int count = 0;
    while (std::getline(lines, line)) {
        if (width == 0) width = line.size();
        CHECK(line.size() == width);
        ++count;
    }
    CHECK(count == 12);
    CHECK(table.find("srtt_ms p75") != std::string::npos);
    const auto j = to_json(rows[0]);
    CHECK(j["srtt_ms"]["p50"].get<double>() == doctest::Approx(rows[0].srtt_ms.p50));

    TraceSet late = t;
    CHECK_THROWS_WITH_AS(summarize(late, Window{at_seconds(50), at_seconds(60)}),
                         doctest::Contains("no samples in window [50.000 s, 60.000 s)"), ValidationError);
}
