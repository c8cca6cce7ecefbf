#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "roccet_lab/cc_core.hpp"
#include "roccet_lab/probe_rate.hpp"
#include "roccet_lab/roccet.hpp"

namespace roccet_lab {

struct RateStep {
    SimTime at;
    double bits_per_second = 0;
};

struct LinkSpec {
    std::vector<RateStep> rate_schedule;
    Duration prop_delay_one_way{0};
    int mtu_bytes = 1500;

    double initial_rate_bps() const { return rate_schedule.empty() ? 0.0 : rate_schedule.front().bits_per_second; }
    Duration base_rtt() const { return 2 * prop_delay_one_way; }
    /// Initial rate times base RTT, in MTU-sized segments.
    double bdp_segments() const;
    void validate() const;
};

enum class SourceKind { Greedy, AppLimited };

struct SourceSpec {
    SourceKind kind = SourceKind::Greedy;
    double app_rate_bps = 0;  // AppLimited only
    SimTime start_at{};
    std::optional<Duration> duration;  // unset: until the horizon
    // Socket send buffer: unacknowledged plus unsent data, in segments.
    std::optional<std::int64_t> send_buffer_segments;

    void validate() const;
};

struct FlowSpec {
    Algo algo = Algo::Cubic;
    int count = 1;
    std::optional<int> id;  // first flow id of the group; assigned when unset
    SourceSpec source;
    std::optional<bool> freeze_when_app_limited;
};

/// Forward-path impairments, active in [from, to).
struct Impairment {
    SimTime from{};
    SimTime to{};
    double drop_probability = 0;
    Duration jitter_max{0};
    std::vector<SimTime> forced_drops;

    bool active_at(SimTime t) const { return t >= from && t < to; }
};

struct ScenarioSpec {
    std::string name = "custom";
    LinkSpec link;
    double buffer_bdp_multiplier = 1.0;
    std::vector<FlowSpec> flows;
    Duration horizon{0};
    std::uint64_t seed = 1;
    Duration sample_interval = std::chrono::milliseconds(10);
    bool delayed_ack = false;
    // Each flow's start is delayed by a seeded uniform draw in [0, start_jitter].
    Duration start_jitter{0};
    Impairment impairment;
    CubicParams cubic;
    RoccetParams roccet;
    ProbeRateParams probe_rate;

    std::int64_t queue_capacity_segments() const;
    int total_flows() const;
    /// Throws ValidationError naming the first violated constraint.
    void validate() const;
};

/// One flow after group expansion.
struct ResolvedFlow {
    int id;
    Algo algo;
    SourceSpec source;
    CubicParams cubic;
};

std::vector<ResolvedFlow> resolve_flows(const ScenarioSpec& spec);

nlohmann::json to_json(const ScenarioSpec& spec);
/// Strict parse: unknown keys, wrong types and invalid values are errors.
ScenarioSpec scenario_from_json(const nlohmann::json& doc);
ScenarioSpec load_scenario_file(const std::string& path);

/// Applies "dotted.path=value" to a fully-populated scenario document. The
/// path must already exist; the value is parsed as JSON, falling back to a
/// plain string.
void apply_override(nlohmann::json& doc, std::string_view assignment);
void set_json_path(nlohmann::json& doc, std::string_view path, const nlohmann::json& value);

ScenarioSpec with_overrides(const ScenarioSpec& spec, const std::vector<std::string>& assignments);

std::vector<std::string> builtin_scenario_names();
ScenarioSpec builtin_scenario(std::string_view name);

}  // namespace roccet_lab
