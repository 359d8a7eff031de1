#include "sddsim/algorithms.hpp"

#include <algorithm>
#include <utility>

namespace sddsim
{

namespace
{

std::optional<Bit> first_bit_from_source(std::span<const MessageRecord> delivered)
{
    for (const auto &m : delivered)
        if (m.sender == ProcessId::Source && !m.payload.empty())
            return m.payload.front() == 0 ? Bit::Zero : Bit::One;
    return std::nullopt;
}

Bytes bit_payload(const LocalState &s) { return Bytes{static_cast<std::uint8_t>(s.input.value_or(Bit::Zero))}; }

// Source side shared by most algorithms: empty memory until the first step,
// which marks it and sends the input; every later step is the identity.
LocalState send_once_transition(const LocalState &state)
{
    if (!state.memory.empty())
        return state;
    LocalState next = state;
    next.memory = {1};
    return next;
}

std::vector<Bytes> send_once_emit(const LocalState &before, const LocalState &after)
{
    if (before.process == ProcessId::Source && before.memory.empty() && !after.memory.empty())
        return {bit_payload(after)};
    return {};
}

std::uint8_t counter(const LocalState &s) { return s.memory.empty() ? 0 : s.memory.front(); }

AlgorithmSpec make_timeout(std::string name, unsigned timeout_steps)
{
    AlgorithmSpec a;
    a.name = std::move(name);
    const auto limit = static_cast<std::uint8_t>(std::clamp(timeout_steps, 1u, 255u));
    a.transition = [limit](const LocalState &state, std::span<const MessageRecord> delivered,
                           const std::optional<FdValue> &) -> LocalState {
        if (state.process == ProcessId::Source)
            return send_once_transition(state);
        if (state.decision)
            return state;
        LocalState next = state;
        if (auto bit = first_bit_from_source(delivered))
        {
            next.decide(*bit);
            return next;
        }
        const std::uint8_t steps = counter(state) + 1;
        next.memory = {steps};
        if (steps >= limit)
            next.decide(Bit::Zero);
        return next;
    };
    a.emit = send_once_emit;
    return a;
}

} // namespace

AlgorithmSpec sync_sdd_solver(const ModelParams &params)
{
    const auto delta = params.delta.value_or(1);
    const auto phi = params.phi.value_or(2);
    auto a = make_timeout("sync-solver", static_cast<unsigned>(delta + phi + 1));
    if (delta != 1 || phi != 2)
        a.name += "(delta=" + std::to_string(delta) + ",phi=" + std::to_string(phi) + ")";
    return a;
}

AlgorithmSpec timeout_decider(unsigned timeout_steps)
{
    return make_timeout("timeout-decider(" + std::to_string(timeout_steps) + ")", timeout_steps);
}

AlgorithmSpec fd_suspicion_decider()
{
    AlgorithmSpec a;
    a.name = "fd-suspicion-decider";
    a.transition = [](const LocalState &state, std::span<const MessageRecord> delivered,
                      const std::optional<FdValue> &fd) -> LocalState {
        if (state.process == ProcessId::Source)
            return send_once_transition(state);
        if (state.decision)
            return state;
        LocalState next = state;
        if (auto bit = first_bit_from_source(delivered))
            next.decide(*bit);
        else if (fd && suspects(*fd, ProcessId::Source))
            next.decide(Bit::Zero);
        return next;
    };
    a.emit = send_once_emit;
    return a;
}

AlgorithmSpec wait_for_source()
{
    AlgorithmSpec a;
    a.name = "wait-for-source";
    a.transition = [](const LocalState &state, std::span<const MessageRecord> delivered,
                      const std::optional<FdValue> &) -> LocalState {
        if (state.process == ProcessId::Source)
            return send_once_transition(state);
        if (state.decision)
            return state;
        LocalState next = state;
        if (auto bit = first_bit_from_source(delivered))
            next.decide(*bit);
        return next;
    };
    a.emit = send_once_emit;
    return a;
}

AlgorithmSpec chatty_algorithm()
{
    AlgorithmSpec a;
    a.name = "chatty";
    a.transition = [](const LocalState &state, std::span<const MessageRecord> delivered,
                      const std::optional<FdValue> &) -> LocalState {
        LocalState next = state;
        if (state.process == ProcessId::Source)
        {
            next.memory = {static_cast<std::uint8_t>(counter(state) + 1)};
            return next;
        }
        if (delivered.empty())
            return state;
        if (!state.decision)
            if (auto bit = first_bit_from_source(delivered))
                next.decide(*bit);
        next.memory = {static_cast<std::uint8_t>(counter(state) + delivered.size())};
        return next;
    };
    a.emit = [](const LocalState &, const LocalState &after) -> std::vector<Bytes> {
        if (after.process == ProcessId::Source)
            return {bit_payload(after)};
        return {};
    };
    return a;
}

AlgorithmSpec double_decider()
{
    AlgorithmSpec a;
    a.name = "double-decider";
    a.transition = [](const LocalState &state, std::span<const MessageRecord> delivered,
                      const std::optional<FdValue> &) -> LocalState {
        if (state.process == ProcessId::Source)
            return send_once_transition(state);
        const auto steps = counter(state);
        if (steps >= 2)
            return state;
        LocalState next = state;
        next.memory = {static_cast<std::uint8_t>(steps + 1)};
        const Bit value = first_bit_from_source(delivered).value_or(steps == 0 ? Bit::Zero : Bit::One);
        next.decide(value);
        return next;
    };
    a.emit = send_once_emit;
    return a;
}

AlgorithmSpec late_sender()
{
    AlgorithmSpec a = wait_for_source();
    a.name = "late-sender";
    const auto d_side = a.transition;
    a.transition = [d_side](const LocalState &state, std::span<const MessageRecord> delivered,
                            const std::optional<FdValue> &fd) -> LocalState {
        if (state.process == ProcessId::Destination)
            return d_side(state, delivered, fd);
        const auto phase = counter(state);
        if (phase >= 2)
            return state;
        LocalState next = state;
        next.memory = {static_cast<std::uint8_t>(phase + 1)};
        return next;
    };
    a.emit = [](const LocalState &before, const LocalState &after) -> std::vector<Bytes> {
        if (after.process == ProcessId::Source && counter(before) == 1 && counter(after) == 2)
            return {bit_payload(after)};
        return {};
    };
    return a;
}

AlgorithmSpec post_decision_updater()
{
    AlgorithmSpec a = wait_for_source();
    a.name = "post-decision-updater";
    const auto base = a.transition;
    a.transition = [base](const LocalState &state, std::span<const MessageRecord> delivered,
                          const std::optional<FdValue> &fd) -> LocalState {
        if (state.process == ProcessId::Destination && state.decision)
        {
            LocalState next = state;
            next.memory = {static_cast<std::uint8_t>(counter(state) + 1)};
            return next;
        }
        return base(state, delivered, fd);
    };
    return a;
}

std::optional<AlgorithmSpec> make_algorithm(std::string_view name, const AlgorithmOptions &options)
{
    if (name.starts_with("c1:"))
    {
        auto inner = make_algorithm(name.substr(3), options);
        if (!inner)
            return std::nullopt;
        return c1_transform(*inner);
    }
    if (name == "sync-solver")
        return sync_sdd_solver(options.model.kind == ModelKind::Async ? ModelParams::synchronous() : options.model);
    if (name == "timeout-decider")
        return timeout_decider(options.timeout_steps);
    if (name == "fd-suspicion-decider")
        return fd_suspicion_decider();
    if (name == "wait-for-source")
        return wait_for_source();
    if (name == "chatty")
        return chatty_algorithm();
    if (name == "double-decider")
        return double_decider();
    if (name == "late-sender")
        return late_sender();
    if (name == "post-decision-updater")
        return post_decision_updater();
    return std::nullopt;
}

std::vector<std::string> algorithm_names()
{
    return {"sync-solver", "timeout-decider", "fd-suspicion-decider", "wait-for-source",
            "chatty",      "double-decider",  "late-sender",          "post-decision-updater"};
}

} // namespace sddsim
