#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sddsim
{

/// The two processes of the system: the source `s` holds the input bit, the
/// destination `d` has to decide it.
enum class ProcessId : std::uint8_t
{
    Source = 0,
    Destination = 1,
};

inline constexpr std::array<ProcessId, 2> kProcesses{ProcessId::Source, ProcessId::Destination};

constexpr std::size_t slot(ProcessId p) noexcept { return static_cast<std::size_t>(p); }
constexpr ProcessId peer(ProcessId p) noexcept
{
    return p == ProcessId::Source ? ProcessId::Destination : ProcessId::Source;
}

std::string_view to_string(ProcessId p) noexcept;
std::optional<ProcessId> parse_process(std::string_view text) noexcept;

/// Time is the configuration index: the step that turns C_i into C_{i+1}
/// happens at time i.
using TimeIndex = std::size_t;

/// Opaque value of a failure-detector domain.
using FdValue = std::string;

/// Crash time per process; absent means the process is correct. A process with
/// crash time c takes no step at any index >= c.
struct FailurePattern
{
    std::array<std::optional<TimeIndex>, 2> crash_time{};

    static FailurePattern none() { return {}; }
    static FailurePattern crash(ProcessId p, TimeIndex at)
    {
        FailurePattern f;
        f.crash_time[slot(p)] = at;
        return f;
    }

    std::optional<TimeIndex> crash_of(ProcessId p) const { return crash_time[slot(p)]; }
    bool crashed_at(ProcessId p, TimeIndex t) const
    {
        const auto c = crash_of(p);
        return c.has_value() && *c <= t;
    }
    bool correct(ProcessId p) const { return !crash_of(p).has_value(); }

    /// F(t): processes crashed up to and including time t.
    std::vector<ProcessId> crashed(TimeIndex t) const;

    friend bool operator==(const FailurePattern &, const FailurePattern &) = default;
};

/// Failure-detector outputs indexed by (querier, time). Histories belong to
/// failure patterns, never to individual executions.
struct FDHistory
{
    std::string domain_name;
    std::map<std::pair<ProcessId, TimeIndex>, FdValue> values;

    std::optional<FdValue> at(ProcessId querier, TimeIndex t) const;

    friend bool operator==(const FDHistory &, const FDHistory &) = default;
};

struct FailureContext
{
    FailurePattern pattern;
    std::optional<FDHistory> history;

    friend bool operator==(const FailureContext &, const FailureContext &) = default;
};

} // namespace sddsim
