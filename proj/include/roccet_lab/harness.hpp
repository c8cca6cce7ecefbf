#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "roccet_lab/metrics.hpp"
#include "roccet_lab/scenario.hpp"

namespace roccet_lab {

inline constexpr std::size_t kDefaultSweepCap = 4096;

/// One swept dimension. `path` is a dotted scenario path ("buffer_bdp",
/// "roccet.alpha", the alias "n_flows", ...).
struct SweepAxis {
    std::string path;
    std::vector<nlohmann::json> values;
};

struct SweepSpec {
    std::string name = "custom";
    ScenarioSpec base;
    std::vector<SweepAxis> axes;
    int repetitions = 1;
    std::size_t cap = kDefaultSweepCap;

    /// Cartesian product size times repetitions.
    std::size_t size() const;
};

using AxisPoint = std::vector<std::pair<std::string, nlohmann::json>>;

struct SweepCell {
    std::size_t index = 0;
    AxisPoint point;
    int repetition = 0;
    ScenarioSpec spec;  // seed already derived
};

struct FlowResult {
    int flow_id = 0;
    Algo algo = Algo::Cubic;
    double goodput_mbps = 0;
    double fraction = 0;
    int ce_count = 0;
};

struct SweepResult {
    std::size_t index = 0;
    AxisPoint point;
    int repetition = 0;
    std::uint64_t seed = 0;
    ShareReport share;
    std::vector<FlowResult> flows;
    bool conserved = false;
};

enum class Execution { Serial, Parallel };

std::string_view to_string(Execution e);

/// Pure function of its inputs; independent of cell order.
std::uint64_t derive_seed(std::uint64_t base_seed, const AxisPoint& point, int repetition);

/// Expands and validates every cell before anything runs. Throws
/// ValidationError when the product exceeds the cap, naming the size.
std::vector<SweepCell> expand(const SweepSpec& sweep);

SweepResult run_cell(const SweepCell& cell);

/// Results come back ordered by cell index regardless of execution mode.
std::vector<SweepResult> run_sweep(const SweepSpec& sweep, Execution exec = Execution::Parallel);

/// Long format: one row per (cell, flow).
void write_results_csv(std::ostream& out, const SweepSpec& sweep, const std::vector<SweepResult>& results);

nlohmann::json to_json(const SweepSpec& sweep);
SweepSpec sweep_from_json(const nlohmann::json& doc);
SweepSpec load_sweep_file(const std::string& path);

std::vector<std::string> builtin_sweep_names();
SweepSpec builtin_sweep(std::string_view name);

}  // namespace roccet_lab
