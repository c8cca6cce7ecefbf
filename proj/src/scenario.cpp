#include "roccet_lab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace roccet_lab {

using nlohmann::json;

namespace {

// Strict object reader: every key read is recorded; leftovers are errors.
class Fields {
public:
    Fields(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ValidationError("expected an object at '" + label() + "'");
    }

    const json* find(const std::string& key) {
        known_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number()) throw ValidationError("expected a number at '" + path(key) + "'");
        return v->get<double>();
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) throw ValidationError("expected an integer at '" + path(key) + "'");
        return v->get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_boolean()) throw ValidationError("expected true/false at '" + path(key) + "'");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string()) throw ValidationError("expected a string at '" + path(key) + "'");
        return v->get<std::string>();
    }

    void finish() const {
        for (const auto& [key, value] : obj_.items())
            if (!known_.contains(key)) throw ValidationError("unknown key '" + path(key) + "'");
    }

private:
    std::string label() const { return where_.empty() ? "<root>" : where_; }

    const json& obj_;
    std::string where_;
    std::set<std::string> known_;
};

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

double mbps(double bps) { return bps / 1e6; }

CubicParams cubic_from_json(Fields f) {
    CubicParams p;
    p.c_scale = f.number("c", p.c_scale);
    p.beta_mult = f.number("beta", p.beta_mult);
    p.fast_convergence = f.boolean("fast_convergence", p.fast_convergence);
    p.freeze_when_app_limited = f.boolean("freeze_when_app_limited", p.freeze_when_app_limited);
    f.finish();
    return p;
}

RoccetParams roccet_from_json(Fields f) {
    RoccetParams p;
    p.alpha = f.number("alpha", p.alpha);
    p.srrtt_threshold = f.number("srrtt_threshold", p.srrtt_threshold);
    p.launch_ack_margin = f.number("launch_ack_margin", p.launch_ack_margin);
    p.launch_interval = from_millis(f.number("launch_interval_ms", to_millis(p.launch_interval)));
    p.orbiter_interval_rtts = static_cast<int>(f.integer("orbiter_interval_rtts", p.orbiter_interval_rtts));
    p.orbiter_deviation = f.number("orbiter_deviation", p.orbiter_deviation);
    p.drain_duration = from_millis(f.number("drain_ms", to_millis(p.drain_duration)));
    p.ignore_loss = f.boolean("ignore_loss", p.ignore_loss);
    p.rtt_min_refresh = f.boolean("rtt_min_refresh", p.rtt_min_refresh);
    p.rtt_min_refresh_age = from_seconds(f.number("rtt_min_refresh_age_s", to_seconds(p.rtt_min_refresh_age)));
    p.rtt_min_refresh_alpha = f.number("rtt_min_refresh_alpha", p.rtt_min_refresh_alpha);
    const std::string clock = f.string("round_clock", std::string(to_string(p.round_clock)));
    const auto parsed = parse_round_clock(clock);
    if (!parsed) throw ValidationError("roccet.round_clock must be 'min_rtt' or 'ack', got '" + clock + "'");
    p.round_clock = *parsed;
    p.loss_ends_slow_start = f.boolean("loss_ends_slow_start", p.loss_ends_slow_start);
    f.finish();
    return p;
}

ProbeRateParams probe_from_json(Fields f) {
    ProbeRateParams p;
    p.startup_gain = f.number("startup_gain", p.startup_gain);
    p.cwnd_gain = f.number("cwnd_gain", p.cwnd_gain);
    p.bw_window_rounds = static_cast<int>(f.integer("bw_window_rounds", p.bw_window_rounds));
    p.min_rtt_window = from_seconds(f.number("min_rtt_window_s", to_seconds(p.min_rtt_window)));
    p.probe_rtt_duration = from_millis(f.number("probe_rtt_ms", to_millis(p.probe_rtt_duration)));
    p.probe_rtt_cwnd = f.number("probe_rtt_cwnd", p.probe_rtt_cwnd);
    f.finish();
    return p;
}

SourceSpec source_from_json(Fields f) {
    SourceSpec s;
    const std::string kind = f.string("kind", "greedy");
    if (kind == "greedy")
        s.kind = SourceKind::Greedy;
    else if (kind == "app_limited")
        s.kind = SourceKind::AppLimited;
    else
        throw ValidationError("source kind must be 'greedy' or 'app_limited', got '" + kind + "'");
    s.app_rate_bps = f.number("rate_mbps", 0) * 1e6;
    s.start_at = at_seconds(f.number("start_s", 0));
    if (const json* d = f.find("duration_s")) {
        if (!d->is_number()) throw ValidationError("expected a number at '" + f.path("duration_s") + "'");
        s.duration = from_seconds(d->get<double>());
    }
    if (const json* b = f.find("send_buffer_segments")) {
        if (!b->is_number_integer())
            throw ValidationError("expected an integer at '" + f.path("send_buffer_segments") + "'");
        s.send_buffer_segments = b->get<std::int64_t>();
    }
    f.finish();
    return s;
}

FlowSpec flow_from_json(Fields f) {
    FlowSpec flow;
    const std::string algo = f.string("algo", "cubic");
    const auto parsed = parse_algo(algo);
    if (!parsed) throw ValidationError("unknown algo '" + algo + "' (reno, cubic, roccet, probe_rate)");
    flow.algo = *parsed;
    flow.count = static_cast<int>(f.integer("count", 1));
    if (f.find("id")) flow.id = static_cast<int>(f.integer("id", 0));
    if (const json* s = f.find("source")) flow.source = source_from_json(Fields(*s, f.path("source")));
    if (f.find("freeze_when_app_limited"))
        flow.freeze_when_app_limited = f.boolean("freeze_when_app_limited", true);
    f.finish();
    return flow;
}

Impairment impairment_from_json(Fields f) {
    Impairment imp;
    imp.from = at_seconds(f.number("from_s", 0));
    imp.to = at_seconds(f.number("to_s", 0));
    imp.drop_probability = f.number("drop_probability", 0);
    imp.jitter_max = from_millis(f.number("jitter_max_ms", 0));
    if (const json* drops = f.find("forced_drops_s")) {
        if (!drops->is_array()) throw ValidationError("expected a list at '" + f.path("forced_drops_s") + "'");
        for (const auto& d : *drops) {
            if (!d.is_number()) throw ValidationError("expected numbers in '" + f.path("forced_drops_s") + "'");
            imp.forced_drops.push_back(at_seconds(d.get<double>()));
        }
    }
    f.finish();
    return imp;
}

LinkSpec link_from_json(Fields f) {
    LinkSpec link;
    link.prop_delay_one_way = from_millis(f.number("rtt_ms", 40) / 2);
    link.mtu_bytes = static_cast<int>(f.integer("mtu_bytes", 1500));
    const json* schedule = f.find("rate_schedule");
    if (!schedule || !schedule->is_array())
        throw ValidationError("'link.rate_schedule' must be a list of {at_s, rate_mbps}");
    std::size_t i = 0;
    for (const auto& step : *schedule) {
        Fields s(step, f.path("rate_schedule." + std::to_string(i++)));
        RateStep r;
        r.at = at_seconds(s.number("at_s", 0));
        r.bits_per_second = s.number("rate_mbps", 0) * 1e6;
        s.finish();
        link.rate_schedule.push_back(r);
    }
    f.finish();
    return link;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.emplace_back(text.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

double LinkSpec::bdp_segments() const {
    return initial_rate_bps() * to_seconds(base_rtt()) / (8.0 * mtu_bytes);
}

void LinkSpec::validate() const {
    if (rate_schedule.empty()) throw ValidationError("link.rate_schedule must have at least one entry");
    if (rate_schedule.front().at != kSimStart) throw ValidationError("link.rate_schedule must start at t = 0");
    for (std::size_t i = 0; i < rate_schedule.size(); ++i) {
        if (!(rate_schedule[i].bits_per_second > 0))
            throw ValidationError("link.rate_schedule." + std::to_string(i) + ".rate_mbps must be > 0");
        if (i > 0 && rate_schedule[i].at <= rate_schedule[i - 1].at)
            throw ValidationError("link.rate_schedule times must be strictly increasing");
    }
    if (prop_delay_one_way <= Duration::zero()) throw ValidationError("link.rtt_ms must be > 0");
    if (mtu_bytes < 64) throw ValidationError("link.mtu_bytes must be >= 64");
}

void SourceSpec::validate() const {
    if (kind == SourceKind::AppLimited && !(app_rate_bps > 0))
        throw ValidationError("app_limited source needs rate_mbps > 0");
    if (start_at < kSimStart) throw ValidationError("source.start_s must be >= 0");
    if (duration && *duration <= Duration::zero()) throw ValidationError("source.duration_s must be > 0");
    if (send_buffer_segments && *send_buffer_segments < 1)
        throw ValidationError("source.send_buffer_segments must be >= 1");
}

std::int64_t ScenarioSpec::queue_capacity_segments() const {
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(buffer_bdp_multiplier * link.bdp_segments() - 1e-9)));
}

int ScenarioSpec::total_flows() const {
    int n = 0;
    for (const auto& f : flows) n += f.count;
    return n;
}

std::vector<ResolvedFlow> resolve_flows(const ScenarioSpec& spec) {
    std::vector<ResolvedFlow> out;
    std::set<int> taken;
    for (const auto& group : spec.flows)
        if (group.id)
            for (int i = 0; i < group.count; ++i)
                if (!taken.insert(*group.id + i).second)
                    throw ValidationError("overlapping flow id " + std::to_string(*group.id + i));
    int next = 0;
    for (const auto& group : spec.flows) {
        for (int i = 0; i < group.count; ++i) {
            int id;
            if (group.id) {
                id = *group.id + i;
            } else {
                while (taken.contains(next)) ++next;
                id = next;
                taken.insert(id);
            }
            CubicParams cubic = spec.cubic;
            if (group.freeze_when_app_limited) cubic.freeze_when_app_limited = *group.freeze_when_app_limited;
            out.push_back({id, group.algo, group.source, cubic});
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

void ScenarioSpec::validate() const {
    link.validate();
    if (!(buffer_bdp_multiplier >= 0.25)) throw ValidationError("buffer_bdp must be >= 0.25");
    if (flows.empty()) throw ValidationError("scenario needs at least one flow");
    if (horizon <= Duration::zero()) throw ValidationError("horizon_s must be > 0");
    if (sample_interval <= Duration::zero()) throw ValidationError("sample_interval_ms must be > 0");
    if (start_jitter < Duration::zero()) throw ValidationError("start_jitter_ms must be >= 0");
    for (const auto& f : flows) {
        if (f.count < 1) throw ValidationError("flow count must be >= 1");
        if (f.id && *f.id < 0) throw ValidationError("flow id must be >= 0");
        f.source.validate();
        if (f.source.start_at + start_jitter >= kSimStart + horizon) throw ValidationError("flow starts after the horizon");
        if (f.source.duration && f.source.start_at + start_jitter + *f.source.duration > kSimStart + horizon)
            throw ValidationError("horizon must cover every flow's end");
    }
    (void)resolve_flows(*this);
    if (!(impairment.drop_probability >= 0 && impairment.drop_probability <= 1))
        throw ValidationError("impairment.drop_probability must be in [0, 1]");
    if (impairment.jitter_max < Duration::zero()) throw ValidationError("impairment.jitter_max_ms must be >= 0");
    cubic.validate();
    roccet.validate();
    probe_rate.validate();
}

json to_json(const ScenarioSpec& spec) {
    json schedule = json::array();
    for (const auto& r : spec.link.rate_schedule)
        schedule.push_back({{"at_s", seconds_since_start(r.at)}, {"rate_mbps", mbps(r.bits_per_second)}});

    json drops = json::array();
    for (const auto& t : spec.impairment.forced_drops) drops.push_back(seconds_since_start(t));

    json flows = json::array();
    for (const auto& f : spec.flows) {
        const auto& s = f.source;
        flows.push_back({
            {"algo", std::string(to_string(f.algo))},
            {"count", f.count},
            {"id", f.id ? json(*f.id) : json(nullptr)},
            {"source",
             {{"kind", s.kind == SourceKind::Greedy ? "greedy" : "app_limited"},
              {"rate_mbps", mbps(s.app_rate_bps)},
              {"start_s", seconds_since_start(s.start_at)},
              {"duration_s", optional_number(s.duration ? std::optional<double>(to_seconds(*s.duration)) : std::nullopt)},
              {"send_buffer_segments", s.send_buffer_segments ? json(*s.send_buffer_segments) : json(nullptr)}}},
            {"freeze_when_app_limited", f.freeze_when_app_limited ? json(*f.freeze_when_app_limited) : json(nullptr)},
        });
    }

    const auto& r = spec.roccet;
    const auto& p = spec.probe_rate;
    return {
        {"name", spec.name},
        {"seed", spec.seed},
        {"horizon_s", to_seconds(spec.horizon)},
        {"sample_interval_ms", to_millis(spec.sample_interval)},
        {"buffer_bdp", spec.buffer_bdp_multiplier},
        {"delayed_ack", spec.delayed_ack},
        {"start_jitter_ms", to_millis(spec.start_jitter)},
        {"link",
         {{"rtt_ms", to_millis(spec.link.base_rtt())}, {"mtu_bytes", spec.link.mtu_bytes}, {"rate_schedule", schedule}}},
        {"impairment",
         {{"from_s", seconds_since_start(spec.impairment.from)},
          {"to_s", seconds_since_start(spec.impairment.to)},
          {"drop_probability", spec.impairment.drop_probability},
          {"jitter_max_ms", to_millis(spec.impairment.jitter_max)},
          {"forced_drops_s", drops}}},
        {"cubic",
         {{"c", spec.cubic.c_scale},
          {"beta", spec.cubic.beta_mult},
          {"fast_convergence", spec.cubic.fast_convergence},
          {"freeze_when_app_limited", spec.cubic.freeze_when_app_limited}}},
        {"roccet",
         {{"alpha", r.alpha},
          {"srrtt_threshold", r.srrtt_threshold},
          {"launch_ack_margin", r.launch_ack_margin},
          {"launch_interval_ms", to_millis(r.launch_interval)},
          {"orbiter_interval_rtts", r.orbiter_interval_rtts},
          {"orbiter_deviation", r.orbiter_deviation},
          {"drain_ms", to_millis(r.drain_duration)},
          {"ignore_loss", r.ignore_loss},
          {"rtt_min_refresh", r.rtt_min_refresh},
          {"rtt_min_refresh_age_s", to_seconds(r.rtt_min_refresh_age)},
          {"rtt_min_refresh_alpha", r.rtt_min_refresh_alpha},
          {"round_clock", std::string(to_string(r.round_clock))},
          {"loss_ends_slow_start", r.loss_ends_slow_start}}},
        {"probe_rate",
         {{"startup_gain", p.startup_gain},
          {"cwnd_gain", p.cwnd_gain},
          {"bw_window_rounds", p.bw_window_rounds},
          {"min_rtt_window_s", to_seconds(p.min_rtt_window)},
          {"probe_rtt_ms", to_millis(p.probe_rtt_duration)},
          {"probe_rtt_cwnd", p.probe_rtt_cwnd}}},
        {"flows", flows},
    };
}

ScenarioSpec scenario_from_json(const json& doc) {
    Fields f(doc, "");
    ScenarioSpec spec;
    spec.name = f.string("name", spec.name);
    const json* seed = f.find("seed");
    if (seed) {
        if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0))
            throw ValidationError("expected a non-negative integer at 'seed'");
        spec.seed = seed->get<std::uint64_t>();
    }
    spec.horizon = from_seconds(f.number("horizon_s", 0));
    spec.sample_interval = from_millis(f.number("sample_interval_ms", 10));
    spec.buffer_bdp_multiplier = f.number("buffer_bdp", 1.0);
    spec.delayed_ack = f.boolean("delayed_ack", false);
    spec.start_jitter = from_millis(f.number("start_jitter_ms", 0));

    const json* link = f.find("link");
    if (!link) throw ValidationError("missing 'link'");
    spec.link = link_from_json(Fields(*link, "link"));
    if (const json* imp = f.find("impairment")) spec.impairment = impairment_from_json(Fields(*imp, "impairment"));
    if (const json* c = f.find("cubic")) spec.cubic = cubic_from_json(Fields(*c, "cubic"));
    if (const json* r = f.find("roccet")) spec.roccet = roccet_from_json(Fields(*r, "roccet"));
    if (const json* p = f.find("probe_rate")) spec.probe_rate = probe_from_json(Fields(*p, "probe_rate"));
    spec.probe_rate.segment_bytes = spec.link.mtu_bytes;

    const json* flows = f.find("flows");
    if (!flows || !flows->is_array()) throw ValidationError("'flows' must be a list");
    for (std::size_t i = 0; i < flows->size(); ++i)
        spec.flows.push_back(flow_from_json(Fields((*flows)[i], "flows." + std::to_string(i))));
    f.finish();
    spec.validate();
    return spec;
}

ScenarioSpec load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed scenario file '" + path + "': " + e.what());
    }
    return scenario_from_json(doc);
}

void set_json_path(json& doc, std::string_view path, const json& value) {
    std::string resolved(path);
    if (resolved == "n_flows") resolved = "flows.0.count";
    json* node = &doc;
    for (const auto& part : split(resolved, '.')) {
        if (node->is_object()) {
            auto it = node->find(part);
            if (it == node->end()) throw ValidationError("unknown key '" + resolved + "'");
            node = &*it;
        } else if (node->is_array()) {
            std::size_t idx = 0;
            std::istringstream in(part);
            if (!(in >> idx) || !in.eof() || idx >= node->size())
                throw ValidationError("unknown key '" + resolved + "'");
            node = &(*node)[idx];
        } else {
            throw ValidationError("unknown key '" + resolved + "'");
        }
    }
    *node = value;
}

void apply_override(json& doc, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ValidationError("override must look like key.path=value, got '" + std::string(assignment) + "'");
    const std::string_view key = assignment.substr(0, eq);
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) value = text;
    set_json_path(doc, key, value);
}

ScenarioSpec with_overrides(const ScenarioSpec& spec, const std::vector<std::string>& assignments) {
    if (assignments.empty()) return spec;
    json doc = to_json(spec);
    for (const auto& a : assignments) apply_override(doc, a);
    return scenario_from_json(doc);
}

// ---------------------------------------------------------------------------
// Built-in scenarios

namespace {

LinkSpec make_link(double rate_mbps, double rtt_ms) {
    LinkSpec link;
    link.rate_schedule = {{kSimStart, rate_mbps * 1e6}};
    link.prop_delay_one_way = from_millis(rtt_ms / 2);
    return link;
}

FlowSpec greedy(Algo algo, double start_s = 0, int count = 1) {
    FlowSpec f;
    f.algo = algo;
    f.count = count;
    f.source.start_at = at_seconds(start_s);
    return f;
}

ScenarioSpec fairness(std::string name, double rate_mbps, double rtt_ms) {
    ScenarioSpec s;
    s.name = std::move(name);
    s.link = make_link(rate_mbps, rtt_ms);
    s.buffer_bdp_multiplier = 1;
    s.horizon = std::chrono::seconds(120);
    s.flows = {greedy(Algo::Roccet, 0), greedy(Algo::Cubic, 1)};
    s.start_jitter = std::chrono::milliseconds(100);
    return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    return {"steady", "bw-halving", "frozen-cwnd", "launch-fill", "fairness-50x30", "fairness-10x40"};
}

ScenarioSpec builtin_scenario(std::string_view name) {
    ScenarioSpec s;
    if (name == "steady") {
        s.name = "steady";
        s.link = make_link(10, 40);
        s.buffer_bdp_multiplier = 1;
        s.horizon = std::chrono::seconds(60);
        s.flows = {greedy(Algo::Cubic)};
    } else if (name == "bw-halving") {
        s.name = "bw-halving";
        s.link = make_link(50, 40);
        s.link.rate_schedule.push_back({at_seconds(15), 25e6});
        s.buffer_bdp_multiplier = 16;
        s.horizon = std::chrono::seconds(35);
        FlowSpec f = greedy(Algo::Roccet);
        // A 1.5 MB socket buffer bounds in-flight data below the 16-BDP queue.
        f.source.send_buffer_segments = 1024;
        s.flows = {f};
    } else if (name == "frozen-cwnd") {
        s.name = "frozen-cwnd";
        s.link = make_link(50, 40);
        s.buffer_bdp_multiplier = 16;
        s.horizon = std::chrono::seconds(60);
        FlowSpec f = greedy(Algo::Cubic);
        f.source.kind = SourceKind::AppLimited;
        f.source.app_rate_bps = 20e6;
        s.flows = {f};
        s.impairment.from = at_seconds(0.5);
        s.impairment.to = at_seconds(5);
        s.impairment.jitter_max = std::chrono::microseconds(200);
        s.impairment.forced_drops = {at_seconds(2.0), at_seconds(4.0)};
    } else if (name == "launch-fill") {
        s.name = "launch-fill";
        s.link = make_link(10, 40);
        s.buffer_bdp_multiplier = 16;
        s.horizon = std::chrono::seconds(20);
        s.flows = {greedy(Algo::Roccet)};
    } else if (name == "fairness-50x30") {
        s = fairness("fairness-50x30", 50, 30);
    } else if (name == "fairness-10x40") {
        s = fairness("fairness-10x40", 10, 40);
    } else {
        throw ValidationError("unknown scenario '" + std::string(name) + "'");
    }
    s.probe_rate.segment_bytes = s.link.mtu_bytes;
    s.validate();
    return s;
}

}  // namespace roccet_lab
