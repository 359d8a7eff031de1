#pragma once

// Exhaustive small-horizon schedule enumeration: every admissible schedule
// (actor, delivery subset, crash pattern) up to the horizon, in canonical order.

#include "sddsim/kernel.hpp"
#include "sddsim/models.hpp"
#include "sddsim/sdd.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sddsim
{

struct EnumerationConfig
{
    AlgorithmSpec algorithm;
    ModelParams params;
    std::size_t horizon = 4;
    std::vector<Bit> inputs{Bit::Zero, Bit::One};
    std::vector<FailurePattern> patterns{FailurePattern::none()};
    InitialCrashInterpretation interpretation = InitialCrashInterpretation::ByFailurePattern;
    /// When set, every pattern runs with the history this source assigns to it.
    FdHistorySource fd_source;
    /// Hard cap on the number of complete schedules; 0 means no cap.
    std::size_t budget = 0;
    /// Counterexample traces kept in memory (all are counted).
    std::size_t keep_counterexamples = 32;
};

struct Counterexample
{
    std::size_t ordinal = 0;
    ExecutionPrefix trace;
    SDDVerdict verdict;
};

struct EnumerationSummary
{
    std::size_t schedules_explored = 0;
    std::map<std::string, std::size_t> verdict_histogram;
    std::size_t violations = 0;
    /// Complete schedules whose d is correct but which end undecided.
    std::size_t undecided_correct = 0;
    std::vector<Counterexample> counterexamples;
};

/// "none": no crashes. "all": every combination of crash times in 0..horizon-1
/// (or none) for both processes, in lexicographic order.
std::vector<FailurePattern> crash_patterns(std::string_view spec, std::size_t horizon);

/// Every admissible node of the schedule tree in depth-first canonical order.
/// `leaf` is true at the horizon or when no process can step any more.
using NodeVisitor = std::function<void(const ExecutionPrefix &node, bool leaf)>;
void visit_schedules(const EnumerationConfig &config, const NodeVisitor &visit);

/// Number of complete admissible schedules; stops counting past `limit`
/// (0 = no limit) and returns limit + 1.
std::size_t count_schedules(const EnumerationConfig &config, std::size_t limit = 0);

/// Throws BudgetExceeded with the computed count when it exceeds the budget.
EnumerationSummary enumerate_schedules(const EnumerationConfig &config);

} // namespace sddsim
