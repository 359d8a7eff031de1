#pragma once

// Test-side oracles. They recompute quantities directly from configurations
// instead of going through the library's own comparison helpers.

#include "sddsim/kernel.hpp"

#include <optional>
#include <vector>

namespace sddsim::testing
{

inline bool same_state(const LocalState &a, const LocalState &b)
{
    return a.process == b.process && a.memory == b.memory && a.input == b.input && a.decision == b.decision &&
           a.decided_count == b.decided_count;
}

inline bool same_point(const Configuration &a, const Configuration &b)
{
    for (std::size_t p = 0; p < 2; ++p)
    {
        if (!same_state(a.states[p], b.states[p]))
            return false;
        const auto &x = a.buffers[p];
        const auto &y = b.buffers[p];
        if (x.size() != y.size())
            return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i].sender != y[i].sender || x[i].payload != y[i].payload || x[i].sent_at != y[i].sent_at ||
                x[i].tag != y[i].tag)
                return false;
    }
    return true;
}

/// First configuration index where the prefixes differ, or nothing when they
/// agree on their common length.
inline std::optional<std::size_t> first_difference(const ExecutionPrefix &a, const ExecutionPrefix &b)
{
    const auto n = std::min(a.configurations.size(), b.configurations.size());
    for (std::size_t i = 0; i < n; ++i)
        if (!same_point(a.configurations[i], b.configurations[i]))
            return i;
    return std::nullopt;
}

/// First configuration index where d holds a decision.
inline std::optional<std::size_t> first_decided(const ExecutionPrefix &p)
{
    for (std::size_t i = 0; i < p.configurations.size(); ++i)
        if (p.configurations[i].states[1].decision)
            return i;
    return std::nullopt;
}

inline StepDirective step(ProcessId actor, std::vector<MessageTag> deliver = {})
{
    StepDirective d;
    d.actor = actor;
    d.deliver = std::move(deliver);
    return d;
}

inline StepDirective s_step(std::vector<MessageTag> deliver = {}) { return step(ProcessId::Source, std::move(deliver)); }
inline StepDirective d_step(std::vector<MessageTag> deliver = {})
{
    return step(ProcessId::Destination, std::move(deliver));
}

} // namespace sddsim::testing
