#include "sddsim/kernel.hpp"

#include <algorithm>
#include <utility>

namespace sddsim
{

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code)
    {
    case ErrorCode::DeliveryNotInBuffer: return "DeliveryNotInBuffer";
    case ErrorCode::ActorCrashed: return "ActorCrashed";
    case ErrorCode::AlgorithmContract: return "AlgorithmContract";
    case ErrorCode::FdMismatch: return "FdMismatch";
    case ErrorCode::ParamMismatch: return "ParamMismatch";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::EmptyPrefix: return "EmptyPrefix";
    case ErrorCode::NonPositiveEpsilon: return "NonPositiveEpsilon";
    case ErrorCode::NotConverging: return "NotConverging";
    case ErrorCode::NotC1Compliant: return "NotC1Compliant";
    case ErrorCode::KindMismatchUnconstructible: return "KindMismatchUnconstructible";
    case ErrorCode::BoundedDecisionTime: return "BoundedDecisionTime";
    case ErrorCode::NoDecisionWithinHorizon: return "NoDecisionWithinHorizon";
    case ErrorCode::NoIndistinguishableSlot: return "NoIndistinguishableSlot";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Trace: return "TraceError";
    }
    return "Unknown";
}

std::string_view to_string(ProcessId p) noexcept { return p == ProcessId::Source ? "s" : "d"; }

std::optional<ProcessId> parse_process(std::string_view text) noexcept
{
    if (text == "s" || text == "source")
        return ProcessId::Source;
    if (text == "d" || text == "destination")
        return ProcessId::Destination;
    return std::nullopt;
}

std::vector<ProcessId> FailurePattern::crashed(TimeIndex t) const
{
    std::vector<ProcessId> out;
    for (auto p : kProcesses)
        if (crashed_at(p, t))
            out.push_back(p);
    return out;
}

std::optional<FdValue> FDHistory::at(ProcessId querier, TimeIndex t) const
{
    auto it = values.find({querier, t});
    if (it == values.end())
        return std::nullopt;
    return it->second;
}

std::optional<Bit> bit_from_int(long long v) noexcept
{
    if (v == 0)
        return Bit::Zero;
    if (v == 1)
        return Bit::One;
    return std::nullopt;
}

std::string_view to_string(StepKind kind) noexcept
{
    switch (kind)
    {
    case StepKind::Send: return "send";
    case StepKind::Receive: return "receive";
    case StepKind::SendReceive: return "send-receive";
    case StepKind::Local: return "local";
    }
    return "local";
}

StepKind classify_step(bool delivered_any, bool sent_any) noexcept
{
    if (sent_any && delivered_any)
        return StepKind::SendReceive;
    if (sent_any)
        return StepKind::Send;
    if (delivered_any)
        return StepKind::Receive;
    return StepKind::Local;
}

Configuration initial_configuration(const Inputs &inputs)
{
    Configuration c;
    c.states[slot(ProcessId::Source)].process = ProcessId::Source;
    c.states[slot(ProcessId::Source)].input = inputs.source;
    c.states[slot(ProcessId::Destination)].process = ProcessId::Destination;
    c.states[slot(ProcessId::Destination)].input = inputs.destination;
    c.index = 0;
    return c;
}

bool is_live(const FailureContext &context, ProcessId p, TimeIndex at)
{
    return !context.pattern.crashed_at(p, at);
}

StepResult apply_step(const Configuration &config, const StepDirective &directive, const AlgorithmSpec &algorithm,
                      const FailureContext &context)
{
    const auto actor = directive.actor;
    if (!is_live(context, actor, config.index))
        throw Error(ErrorCode::ActorCrashed,
                    std::string(to_string(actor)) + " is crashed at index " + std::to_string(config.index),
                    config.index);

    Configuration next = config;
    next.index = config.index + 1;
    auto &own = next.buffers[slot(actor)];

    std::vector<MessageRecord> delivered;
    delivered.reserve(directive.deliver.size());
    for (auto tag : directive.deliver)
    {
        auto it = std::find_if(own.begin(), own.end(), [tag](const MessageRecord &m) { return m.tag == tag; });
        if (it == own.end())
            throw Error(ErrorCode::DeliveryNotInBuffer,
                        "tag " + std::to_string(tag) + " not in buffer of " + std::string(to_string(actor)),
                        config.index);
        delivered.push_back(std::move(*it));
        own.erase(it);
    }
    std::sort(delivered.begin(), delivered.end(),
              [](const MessageRecord &a, const MessageRecord &b) { return a.tag < b.tag; });

    const LocalState &before = config.state(actor);
    LocalState after = algorithm.transition(before, delivered, directive.fd_value);
    if (after.process != before.process || after.input != before.input || after.decided_count < before.decided_count ||
        (before.decision.has_value() && !after.decision.has_value()))
        throw Error(ErrorCode::AlgorithmContract, algorithm.name + " altered protected state fields", config.index);

    const auto payloads = algorithm.emit(before, after);
    next.states[slot(actor)] = std::move(after);

    StepOutcome outcome;
    outcome.actor = actor;
    outcome.fd_value = directive.fd_value;
    auto &peer_buffer = next.buffers[slot(peer(actor))];
    for (std::size_t j = 0; j < payloads.size(); ++j)
    {
        MessageRecord m{actor, peer(actor), payloads[j], config.index, make_tag(config.index, j)};
        outcome.messages_sent.push_back(m);
        peer_buffer.push_back(std::move(m));
    }
    outcome.kind = classify_step(!delivered.empty(), !outcome.messages_sent.empty());
    outcome.delivered = std::move(delivered);
    outcome.trivial = next == config;
    return {std::move(next), std::move(outcome)};
}

StepDirective with_history_fd(StepDirective directive, const FailureContext &context, TimeIndex at)
{
    if (!context.history)
        return directive;
    auto recorded = context.history->at(directive.actor, at);
    if (!recorded)
        return directive;
    if (directive.fd_value && *directive.fd_value != *recorded)
        throw Error(ErrorCode::FdMismatch, "directive fd value disagrees with the history", at);
    directive.fd_value = std::move(recorded);
    return directive;
}

namespace
{

class Fnv64
{
public:
    void byte(std::uint8_t b)
    {
        m_hash ^= b;
        m_hash *= 0x100000001b3ULL;
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            byte(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void bytes(const Bytes &b)
    {
        u64(b.size());
        for (auto x : b)
            byte(x);
    }
    void text(std::string_view s)
    {
        u64(s.size());
        for (char c : s)
            byte(static_cast<std::uint8_t>(c));
    }
    void opt_bit(const std::optional<Bit> &b) { byte(b ? static_cast<std::uint8_t>(*b) : 0xff); }
    void opt_index(const std::optional<TimeIndex> &t)
    {
        byte(t ? 1 : 0);
        u64(t ? *t : 0);
    }
    std::uint64_t value() const { return m_hash; }

private:
    std::uint64_t m_hash = 0xcbf29ce484222325ULL;
};

void hash_context(Fnv64 &h, const FailureContext &ctx)
{
    for (auto p : kProcesses)
        h.opt_index(ctx.pattern.crash_of(p));
    h.byte(ctx.history ? 1 : 0);
    if (ctx.history)
    {
        h.text(ctx.history->domain_name);
        h.u64(ctx.history->values.size());
        for (const auto &[key, value] : ctx.history->values)
        {
            h.byte(static_cast<std::uint8_t>(key.first));
            h.u64(key.second);
            h.text(value);
        }
    }
}

void hash_head(Fnv64 &h, std::string_view kind, const std::string &algorithm, const Inputs &inputs)
{
    h.text(kind);
    h.text(algorithm);
    h.opt_bit(inputs.source);
    h.opt_bit(inputs.destination);
}

ExecutionPrefix start(const AlgorithmSpec &algorithm, const Inputs &inputs, const FailureContext &context)
{
    ExecutionPrefix prefix;
    prefix.configurations.push_back(initial_configuration(inputs));
    prefix.context = context;
    prefix.algorithm = algorithm.name;
    prefix.inputs = inputs;
    return prefix;
}

void append(ExecutionPrefix &prefix, StepDirective directive, const AlgorithmSpec &algorithm)
{
    const auto at = prefix.last().index;
    try
    {
        directive = with_history_fd(std::move(directive), prefix.context, at);
        auto result = apply_step(prefix.last(), directive, algorithm, prefix.context);
        prefix.configurations.push_back(std::move(result.next));
        prefix.outcomes.push_back(std::move(result.outcome));
        prefix.schedule.push_back(std::move(directive));
    }
    catch (const Error &e)
    {
        if (e.index())
            throw;
        throw Error(e.code(), std::string(e.what()) + " (step " + std::to_string(at) + ")", at);
    }
}

} // namespace

std::uint64_t digest(const Configuration &config)
{
    Fnv64 h;
    for (const auto &s : config.states)
    {
        h.byte(static_cast<std::uint8_t>(s.process));
        h.bytes(s.memory);
        h.opt_bit(s.input);
        h.opt_bit(s.decision);
        h.u64(s.decided_count);
    }
    for (const auto &buffer : config.buffers)
    {
        h.u64(buffer.size());
        for (const auto &m : buffer)
        {
            h.byte(static_cast<std::uint8_t>(m.sender));
            h.byte(static_cast<std::uint8_t>(m.receiver));
            h.bytes(m.payload);
            h.u64(m.sent_at);
            h.u64(m.tag);
        }
    }
    return h.value();
}

ExecutionPrefix run(const AlgorithmSpec &algorithm, const Inputs &inputs, std::span<const StepDirective> schedule,
                    const FailureContext &context)
{
    auto prefix = start(algorithm, inputs, context);
    prefix.configurations.reserve(schedule.size() + 1);
    for (const auto &directive : schedule)
        append(prefix, directive, algorithm);

    Fnv64 h;
    hash_head(h, "explicit", algorithm.name, inputs);
    h.u64(prefix.schedule.size());
    for (const auto &d : prefix.schedule)
    {
        h.byte(static_cast<std::uint8_t>(d.actor));
        h.u64(d.deliver.size());
        for (auto t : d.deliver)
            h.u64(t);
        h.byte(d.fd_value ? 1 : 0);
        h.text(d.fd_value.value_or(""));
    }
    hash_context(h, context);
    prefix.provenance = h.value();
    return prefix;
}

ExecutionPrefix run_generated(const AlgorithmSpec &algorithm, const Inputs &inputs, const ScheduleGenerator &generator,
                              const FailureContext &context, std::size_t horizon)
{
    auto prefix = start(algorithm, inputs, context);
    for (std::size_t i = 0; i < horizon; ++i)
    {
        auto directive = generator.next(prefix.last(), context);
        if (!directive)
            break;
        append(prefix, std::move(*directive), algorithm);
    }
    Fnv64 h;
    hash_head(h, "generated", algorithm.name, inputs);
    h.text(generator.id);
    hash_context(h, context);
    prefix.provenance = h.value();
    return prefix;
}

ExecutionPrefix extend(const ExecutionPrefix &prefix, const StepDirective &directive, const AlgorithmSpec &algorithm)
{
    ExecutionPrefix out = prefix;
    out.provenance.reset();
    append(out, directive, algorithm);
    return out;
}

ScheduleGenerator lockstep_generator(ProcessId first)
{
    ScheduleGenerator g;
    g.id = std::string("lockstep-") + std::string(to_string(first)) + "-first";
    g.next = [first](const Configuration &config, const FailureContext &context) -> std::optional<StepDirective> {
        ProcessId actor = config.index % 2 == 0 ? first : peer(first);
        if (!is_live(context, actor, config.index))
            actor = peer(actor);
        if (!is_live(context, actor, config.index))
            return std::nullopt;
        StepDirective d;
        d.actor = actor;
        for (const auto &m : config.buffer(actor))
            d.deliver.push_back(m.tag);
        return d;
    };
    return g;
}

std::vector<StepDirective> candidate_directives(const Configuration &config, const FailureContext &context)
{
    std::vector<StepDirective> out;
    for (auto p : kProcesses)
    {
        if (!is_live(context, p, config.index))
            continue;
        const auto &buffer = config.buffer(p);
        if (buffer.size() > 20)
            throw Error(ErrorCode::BudgetExceeded, "buffer too large to enumerate delivery subsets", config.index);
        const std::size_t subsets = std::size_t{1} << buffer.size();
        for (std::size_t mask = 0; mask < subsets; ++mask)
        {
            StepDirective d;
            d.actor = p;
            for (std::size_t j = 0; j < buffer.size(); ++j)
                if (mask & (std::size_t{1} << j))
                    d.deliver.push_back(buffer[j].tag);
            out.push_back(with_history_fd(std::move(d), context, config.index));
        }
    }
    return out;
}

std::optional<TimeIndex> decision_time(const ExecutionPrefix &prefix)
{
    for (std::size_t k = 0; k < prefix.configurations.size(); ++k)
    {
        if (prefix.configurations[k].state(ProcessId::Destination).decision.has_value())
            return k;
    }
    return std::nullopt;
}

} // namespace sddsim
