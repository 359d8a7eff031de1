#pragma once

// Deterministic execution engine for the two-process system: local states,
// configurations, single-process steps and horizon-bounded execution prefixes.

#include "sddsim/errors.hpp"
#include "sddsim/failure.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sddsim
{

enum class Bit : std::uint8_t
{
    Zero = 0,
    One = 1,
};

constexpr Bit flip(Bit b) noexcept { return b == Bit::Zero ? Bit::One : Bit::Zero; }
constexpr int to_int(Bit b) noexcept { return static_cast<int>(b); }
std::optional<Bit> bit_from_int(long long v) noexcept;

using Bytes = std::vector<std::uint8_t>;
using MessageTag = std::uint64_t;

/// Tags are (sent_at, ordinal within the emitting step); one actor per index
/// makes them unique within an execution.
constexpr MessageTag make_tag(TimeIndex sent_at, std::size_t ordinal) noexcept
{
    return (static_cast<MessageTag>(sent_at) << 16) | static_cast<MessageTag>(ordinal);
}

struct MessageRecord
{
    ProcessId sender = ProcessId::Source;
    ProcessId receiver = ProcessId::Destination;
    Bytes payload;
    TimeIndex sent_at = 0;
    MessageTag tag = 0;

    friend bool operator==(const MessageRecord &, const MessageRecord &) = default;
};

struct LocalState
{
    ProcessId process = ProcessId::Source;
    Bytes memory;
    std::optional<Bit> input;
    std::optional<Bit> decision;
    unsigned decided_count = 0;

    /// Records a decision event. Calling it twice is an Integrity violation
    /// that the checkers are expected to see, so it is not prevented here.
    void decide(Bit value)
    {
        decision = value;
        ++decided_count;
    }

    friend bool operator==(const LocalState &, const LocalState &) = default;
};

struct Configuration
{
    std::array<LocalState, 2> states;
    /// Per receiver, kept sorted by tag.
    std::array<std::vector<MessageRecord>, 2> buffers;
    TimeIndex index = 0;

    const LocalState &state(ProcessId p) const { return states[slot(p)]; }
    const std::vector<MessageRecord> &buffer(ProcessId p) const { return buffers[slot(p)]; }

    /// Two configurations are the same point when states and buffers agree;
    /// the index is the position in the execution, not part of the point.
    friend bool operator==(const Configuration &a, const Configuration &b)
    {
        return a.states == b.states && a.buffers == b.buffers;
    }
};

struct StepDirective
{
    ProcessId actor = ProcessId::Source;
    std::vector<MessageTag> deliver;
    std::optional<FdValue> fd_value;

    friend bool operator==(const StepDirective &, const StepDirective &) = default;
};

enum class StepKind
{
    Send,
    Receive,
    SendReceive,
    Local,
};

std::string_view to_string(StepKind kind) noexcept;
StepKind classify_step(bool delivered_any, bool sent_any) noexcept;

struct StepOutcome
{
    ProcessId actor = ProcessId::Source;
    StepKind kind = StepKind::Local;
    bool trivial = true;
    std::vector<MessageRecord> delivered;
    std::vector<MessageRecord> messages_sent;
    std::optional<FdValue> fd_value;
};

/// A deterministic two-process algorithm. `transition` maps the actor's state,
/// the delivered messages and the optional failure-detector reading to the new
/// state; `emit` computes the outbound payloads from the pre- and post-step
/// states and is evaluated exactly once per step. Payloads go to the peer.
struct AlgorithmSpec
{
    using Transition = std::function<LocalState(const LocalState &, std::span<const MessageRecord>,
                                                const std::optional<FdValue> &)>;
    using Emit = std::function<std::vector<Bytes>(const LocalState &before, const LocalState &after)>;

    std::string name;
    Transition transition;
    Emit emit;
};

struct Inputs
{
    std::optional<Bit> source;
    std::optional<Bit> destination;

    friend bool operator==(const Inputs &, const Inputs &) = default;
};

Configuration initial_configuration(const Inputs &inputs);

struct StepResult
{
    Configuration next;
    StepOutcome outcome;
};

/// Applies one step. The directive's fd value is passed through as given.
StepResult apply_step(const Configuration &config, const StepDirective &directive, const AlgorithmSpec &algorithm,
                      const FailureContext &context);

/// A finite prefix C_0..C_L together with the schedule that produced it.
struct ExecutionPrefix
{
    std::vector<Configuration> configurations;
    std::vector<StepDirective> schedule;
    std::vector<StepOutcome> outcomes;
    FailureContext context;
    std::string algorithm;
    Inputs inputs;
    /// Identity of the infinite execution this prefix belongs to. Set only
    /// when the generating tuple fully determines the execution.
    std::optional<std::uint64_t> provenance;

    std::size_t horizon() const noexcept { return schedule.size(); }
    const Configuration &initial() const { return configurations.front(); }
    const Configuration &last() const { return configurations.back(); }
};

/// Runs an explicit schedule. Missing fd values are filled from the context's
/// history; a directive that disagrees with the history is rejected. The
/// schedule denotes the execution that continues it with the canonical
/// lock-step tail, so the result carries a provenance.
ExecutionPrefix run(const AlgorithmSpec &algorithm, const Inputs &inputs, std::span<const StepDirective> schedule,
                    const FailureContext &context);

/// Produces the next directive from the current configuration, or nothing when
/// no process can step any more.
struct ScheduleGenerator
{
    std::string id;
    std::function<std::optional<StepDirective>(const Configuration &, const FailureContext &)> next;
};

ExecutionPrefix run_generated(const AlgorithmSpec &algorithm, const Inputs &inputs, const ScheduleGenerator &generator,
                              const FailureContext &context, std::size_t horizon);

/// Appends one step. The result has no provenance.
ExecutionPrefix extend(const ExecutionPrefix &prefix, const StepDirective &directive, const AlgorithmSpec &algorithm);

/// Alternates s and d (starting with `first`), delivering the actor's whole
/// buffer; a crashed actor is skipped.
ScheduleGenerator lockstep_generator(ProcessId first = ProcessId::Source);

/// Fills in the history's value for the directive when the directive has none.
StepDirective with_history_fd(StepDirective directive, const FailureContext &context, TimeIndex at);

bool is_live(const FailureContext &context, ProcessId p, TimeIndex at);

/// Every directive available at `config`: live actor, then every subset of its
/// buffer in binary counting order over the sorted tags.
std::vector<StepDirective> candidate_directives(const Configuration &config, const FailureContext &context);

/// Least k such that d has decided in C_k but not in C_{k-1}.
std::optional<TimeIndex> decision_time(const ExecutionPrefix &prefix);

/// Stable 64-bit digest of a configuration (states and buffers, not the index).
std::uint64_t digest(const Configuration &config);

// -- (C1) normal form ------------------------------------------------------

struct C1Report
{
    bool compliant = true;
    std::optional<TimeIndex> violation_index;
    std::string clause;
};

C1Report is_c1_compliant(const ExecutionPrefix &prefix);

/// s sends its input once in its first step and is inert afterwards; d runs the
/// wrapped algorithm until the message arrives, decides its value on receipt if
/// still undecided and is inert from then on. d sends nothing.
AlgorithmSpec c1_transform(const AlgorithmSpec &algorithm);

} // namespace sddsim
