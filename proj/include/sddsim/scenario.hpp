#pragma once

// Scenario documents for the command-line runner (JSON).

#include "sddsim/algorithms.hpp"
#include "sddsim/enumerate.hpp"
#include "sddsim/sdd.hpp"
#include "sddsim/trace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sddsim
{

struct ScheduledStep
{
    ProcessId actor = ProcessId::Source;
    /// nullopt delivers the actor's whole buffer.
    std::optional<std::vector<MessageTag>> deliver;
    std::optional<FdValue> fd_value;
};

struct ScenarioConfig
{
    std::string algorithm = "sync-solver";
    AlgorithmOptions algorithm_options;
    Inputs inputs{Bit::Zero, std::nullopt};
    ModelParams model = ModelParams::synchronous();
    FailurePattern failure;
    /// "none" (no fd), "perfect" or "random" (seeded by `seed`).
    std::string fd = "none";
    std::uint64_t seed = 0;
    std::size_t horizon = 8;
    std::size_t budget = 0;
    InitialCrashInterpretation interpretation = InitialCrashInterpretation::ByFailurePattern;

    /// "lockstep" (s first), "lockstep-d", or "explicit" with `steps`.
    std::string schedule = "lockstep";
    std::vector<ScheduledStep> steps;

    // enumerate
    std::vector<Bit> enumerate_inputs{Bit::Zero, Bit::One};
    /// "none", "all" or "given" (just `failure`).
    std::string crash_patterns = "given";
    std::size_t keep_counterexamples = 32;

    // closure
    std::size_t k_max = 8;
    Bit family_input = Bit::Zero;

    // theorem3
    std::size_t extension_budget = 6;

    // fd harnesses
    TimeIndex crash_time = 3;
    std::size_t horizon_cap = 80;
    /// Extra runs of the pattern harness with this many random history tables.
    std::size_t random_tables = 0;

    /// Registry name, timeout and model: enough to rebuild the algorithm from
    /// a trace header.
    Json algorithm_options_json() const;
};

Json model_to_json(const ModelParams &params);

/// Inverse of ScenarioConfig::algorithm_options_json. Throws Error(Trace).
AlgorithmSpec algorithm_from_options(const Json &options);

/// Throws Error(Config) as "<origin>:<line>:<col>: <message>" for syntax errors
/// and "<origin>: <field>: <message>" for bad values.
ScenarioConfig parse_scenario(std::string_view text, const std::string &origin = "<config>");
ScenarioConfig load_scenario(const std::string &path);

/// Throws Error(Config) for unknown names.
AlgorithmSpec resolve_algorithm(const ScenarioConfig &config);
/// Empty when the scenario uses no failure detector.
FdHistorySource resolve_fd_source(const ScenarioConfig &config);
FailureContext scenario_context(const ScenarioConfig &config);
EnumerationConfig enumeration_config(const ScenarioConfig &config);

ExecutionPrefix run_scenario(const ScenarioConfig &config, const AlgorithmSpec &algorithm);

} // namespace sddsim
