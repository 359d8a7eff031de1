#include "sddsim/kernel.hpp"

#include <algorithm>
#include <utility>

namespace sddsim
{

namespace
{

void note(C1Report &report, TimeIndex at, const char *clause)
{
    if (report.compliant || at < *report.violation_index)
    {
        report.compliant = false;
        report.violation_index = at;
        report.clause = clause;
    }
}

bool from_source(const std::vector<MessageRecord> &delivered)
{
    return std::any_of(delivered.begin(), delivered.end(),
                       [](const MessageRecord &m) { return m.sender == ProcessId::Source; });
}

// Destination memory under the transform: empty, or [received flag] + inner memory.
struct WrappedMemory
{
    bool received = false;
    Bytes inner;
};

WrappedMemory unwrap(const Bytes &memory)
{
    if (memory.empty())
        return {};
    return {memory.front() != 0, Bytes(memory.begin() + 1, memory.end())};
}

Bytes wrap(const WrappedMemory &w)
{
    if (!w.received && w.inner.empty())
        return {};
    Bytes out;
    out.reserve(w.inner.size() + 1);
    out.push_back(w.received ? 1 : 0);
    out.insert(out.end(), w.inner.begin(), w.inner.end());
    return out;
}

} // namespace

C1Report is_c1_compliant(const ExecutionPrefix &prefix)
{
    C1Report report;
    const auto decided = decision_time(prefix);

    std::optional<TimeIndex> first_send;
    bool source_stepped = false;
    bool receive_seen = false;

    for (std::size_t i = 0; i < prefix.outcomes.size(); ++i)
    {
        const auto &o = prefix.outcomes[i];
        if (o.actor == ProcessId::Source)
        {
            if (!source_stepped)
            {
                source_stepped = true;
                // (d) the first step of s is a send to d
                if (o.messages_sent.empty())
                    note(report, i, "d: first step of s is not a send");
            }
            if (first_send && i > *first_send && !o.trivial)
                note(report, i, "c: non-trivial step of s after its send");
            if (!first_send && !o.messages_sent.empty())
                first_send = i;
        }
        else
        {
            // step i produces C_{i+1}; d has decided by then iff decision_time <= i + 1
            if (!receive_seen && from_source(o.delivered))
            {
                receive_seen = true;
                if (!decided || *decided > i + 1)
                    note(report, i, "a: d did not decide upon receiving from s");
            }
            if (decided && i >= *decided && !o.trivial)
                note(report, i, "b: non-trivial step of d after deciding");
        }
    }
    return report;
}

AlgorithmSpec c1_transform(const AlgorithmSpec &algorithm)
{
    AlgorithmSpec out;
    out.name = "c1(" + algorithm.name + ")";
    const auto inner = algorithm.transition;

    out.transition = [inner](const LocalState &state, std::span<const MessageRecord> delivered,
                             const std::optional<FdValue> &fd) -> LocalState {
        if (state.process == ProcessId::Source)
        {
            if (!state.memory.empty())
                return state;
            LocalState next = state;
            next.memory = {1};
            return next;
        }

        auto w = unwrap(state.memory);
        if (w.received)
            return state;

        auto m = std::find_if(delivered.begin(), delivered.end(),
                              [](const MessageRecord &r) { return r.sender == ProcessId::Source; });
        if (m != delivered.end())
        {
            LocalState next = state;
            w.received = true;
            next.memory = wrap(w);
            if (!next.decision && !m->payload.empty())
                next.decide(m->payload.front() == 0 ? Bit::Zero : Bit::One);
            return next;
        }

        LocalState view = state;
        view.memory = w.inner;
        LocalState stepped = inner(view, {}, fd);
        w.inner = std::move(stepped.memory);
        stepped.memory = wrap(w);
        return stepped;
    };

    out.emit = [](const LocalState &before, const LocalState &after) -> std::vector<Bytes> {
        if (before.process == ProcessId::Source && before.memory.empty() && !after.memory.empty())
            return {Bytes{static_cast<std::uint8_t>(after.input.value_or(Bit::Zero))}};
        return {};
    };
    return out;
}

} // namespace sddsim
