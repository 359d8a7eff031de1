#include "sddsim/sdd.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace sddsim
{

std::string_view to_string(InitialCrashInterpretation interp) noexcept
{
    return interp == InitialCrashInterpretation::ByFailurePattern ? "failure-pattern" : "step-activity";
}

std::string to_string(const PropertyStatus &s)
{
    switch (s.kind)
    {
    case PropertyStatus::Kind::Holds: return "holds";
    case PropertyStatus::Kind::ViolatedAt: return "violated@" + std::to_string(s.index);
    case PropertyStatus::Kind::VacuouslyHolds: return "vacuous";
    case PropertyStatus::Kind::Pending: return "pending";
    case PropertyStatus::Kind::DecidedAt: return "decided@" + std::to_string(s.index);
    }
    return "pending";
}

std::string SDDVerdict::category() const
{
    auto coarse = [](const PropertyStatus &s) -> std::string {
        switch (s.kind)
        {
        case PropertyStatus::Kind::Holds: return "holds";
        case PropertyStatus::Kind::ViolatedAt: return "violated";
        case PropertyStatus::Kind::VacuouslyHolds: return "vacuous";
        case PropertyStatus::Kind::Pending: return "pending";
        case PropertyStatus::Kind::DecidedAt: return "decided";
        }
        return "pending";
    };
    return "integrity=" + coarse(integrity) + " validity=" + coarse(validity) + " termination=" + coarse(termination);
}

std::optional<bool> initially_crashed(const ExecutionPrefix &prefix, InitialCrashInterpretation interp)
{
    const auto crash = prefix.context.pattern.crash_of(ProcessId::Source);
    if (interp == InitialCrashInterpretation::ByFailurePattern)
        return crash.has_value() && *crash == 0;

    const bool stepped = std::any_of(prefix.schedule.begin(), prefix.schedule.end(),
                                     [](const StepDirective &d) { return d.actor == ProcessId::Source; });
    if (stepped)
        return false;
    // s has not stepped in [0, horizon); if it is down by the horizon it never will
    if (crash && *crash <= prefix.horizon())
        return true;
    return std::nullopt;
}

SDDVerdict check_sdd(const ExecutionPrefix &prefix, InitialCrashInterpretation interp)
{
    if (prefix.configurations.empty() || !prefix.initial().state(ProcessId::Source).input)
        throw Error(ErrorCode::MissingInput, "C_0 carries no source input");
    const Bit input = *prefix.initial().state(ProcessId::Source).input;

    SDDVerdict v;
    v.integrity = {PropertyStatus::Kind::Holds, 0};
    std::optional<TimeIndex> wrong;
    for (std::size_t k = 0; k < prefix.configurations.size(); ++k)
    {
        const auto &d = prefix.configurations[k].state(ProcessId::Destination);
        if (d.decided_count >= 2 && !v.integrity.violated())
            v.integrity = {PropertyStatus::Kind::ViolatedAt, k};
        if (!wrong && d.decision && *d.decision != input)
            wrong = k;
    }

    const auto decided = decision_time(prefix);
    v.termination = decided ? PropertyStatus{PropertyStatus::Kind::DecidedAt, *decided}
                            : PropertyStatus{PropertyStatus::Kind::Pending, 0};

    const auto crashed = initially_crashed(prefix, interp);
    if (crashed == true)
        v.validity = {PropertyStatus::Kind::VacuouslyHolds, 0};
    else if (wrong)
        v.validity = crashed == false ? PropertyStatus{PropertyStatus::Kind::ViolatedAt, *wrong}
                                      : PropertyStatus{PropertyStatus::Kind::Pending, 0};
    else if (decided)
        v.validity = {PropertyStatus::Kind::Holds, 0};
    else
        v.validity = {PropertyStatus::Kind::Pending, 0};
    return v;
}

PropertyMonitor integrity_monitor()
{
    return {"integrity", [](const ExecutionPrefix &p) {
                const auto v = check_sdd(p, InitialCrashInterpretation::ByFailurePattern);
                return v.integrity.violated() ? MonitorVerdict::violated_at(v.integrity.index)
                                              : MonitorVerdict::pending();
            }};
}

PropertyMonitor validity_monitor(InitialCrashInterpretation interp)
{
    return {"validity(" + std::string(to_string(interp)) + ")", [interp](const ExecutionPrefix &p) {
                const auto v = check_sdd(p, interp);
                return v.validity.violated() ? MonitorVerdict::violated_at(v.validity.index)
                                             : MonitorVerdict::pending();
            }};
}

PropertyMonitor termination_monitor()
{
    return {"termination", [](const ExecutionPrefix &p) {
                return decision_time(p) ? MonitorVerdict::satisfied() : MonitorVerdict::pending();
            }};
}

namespace
{

StepDirective deliver_all(ProcessId actor, const Configuration &config)
{
    StepDirective d;
    d.actor = actor;
    for (const auto &m : config.buffer(actor))
        d.deliver.push_back(m.tag);
    return d;
}

ScheduleGenerator deferred_delivery_generator(std::size_t k)
{
    ScheduleGenerator g;
    g.id = "defer-" + std::to_string(k);
    g.next = [k](const Configuration &config, const FailureContext &ctx) -> std::optional<StepDirective> {
        const auto i = config.index;
        ProcessId actor = ProcessId::Source;
        if (i > k)
            actor = (i - (k + 1)) % 2 == 0 ? ProcessId::Destination : ProcessId::Source;
        if (!is_live(ctx, actor, i))
            return std::nullopt;
        return deliver_all(actor, config);
    };
    return g;
}

ScheduleGenerator source_only_generator()
{
    ScheduleGenerator g;
    g.id = "never-stabilizing";
    g.next = [](const Configuration &config, const FailureContext &ctx) -> std::optional<StepDirective> {
        if (!is_live(ctx, ProcessId::Source, config.index))
            return std::nullopt;
        return deliver_all(ProcessId::Source, config);
    };
    return g;
}

} // namespace

ExecutionFamily unbounded_decision_family(const AlgorithmSpec &algorithm, Bit input, std::size_t k_max,
                                          std::size_t horizon)
{
    const std::size_t base = horizon == 0 ? k_max + 4 : horizon;
    auto member_horizon = [base](std::size_t k) { return std::max(base, k + 4); };
    auto generate = [algorithm, input, member_horizon](std::size_t k) {
        return run_generated(algorithm, Inputs{input, std::nullopt}, deferred_delivery_generator(k), FailureContext{},
                             member_horizon(k));
    };

    for (std::size_t k : {std::size_t{0}, k_max})
    {
        const auto probe = generate(k);
        const auto c1 = is_c1_compliant(probe);
        if (!c1.compliant)
            throw Error(ErrorCode::NotC1Compliant, algorithm.name + " violates (C1) clause " + c1.clause,
                        c1.violation_index);
    }
    for (auto first : kProcesses)
    {
        const auto probe = run_generated(algorithm, Inputs{input, std::nullopt}, lockstep_generator(first),
                                         FailureContext{}, base);
        const auto c1 = is_c1_compliant(probe);
        if (!c1.compliant)
            throw Error(ErrorCode::NotC1Compliant, algorithm.name + " violates (C1) clause " + c1.clause,
                        c1.violation_index);
    }

    ExecutionFamily family;
    family.generator = generate;
    family.family_horizon = member_horizon;
    family.params_for = [](std::size_t k) { return ModelParams::gst_model(k); };
    family.description = "delivery of s's first message deferred k ticks (gst = k), input " +
                         std::to_string(to_int(input)) + ", " + algorithm.name;
    return family;
}

ExecutionPrefix never_stabilizing_limit(const AlgorithmSpec &algorithm, Bit input, std::size_t horizon)
{
    return run_generated(algorithm, Inputs{input, std::nullopt}, source_only_generator(), FailureContext{}, horizon);
}

ExecutionPrefix mirror_schedule(const ExecutionPrefix &original, Bit flipped_input, const AlgorithmSpec &algorithm)
{
    const auto original_input = original.inputs.source;
    if (original_input && *original_input == flipped_input)
        throw Error(ErrorCode::ParamMismatch, "mirror needs the opposite input");

    Inputs inputs = original.inputs;
    inputs.source = flipped_input;
    std::map<MessageTag, MessageTag> counterpart;
    std::vector<StepDirective> schedule;
    ExecutionPrefix partial = run(algorithm, inputs, {}, original.context);

    for (std::size_t i = 0; i < original.horizon(); ++i)
    {
        const auto &od = original.schedule[i];
        const auto &oo = original.outcomes[i];
        StepDirective directive;
        directive.actor = od.actor;
        directive.fd_value = od.fd_value;
        for (auto tag : od.deliver)
        {
            auto it = counterpart.find(tag);
            if (it == counterpart.end())
                throw Error(ErrorCode::KindMismatchUnconstructible, "no mirrored counterpart for a delivered message",
                            i);
            directive.deliver.push_back(it->second);
        }
        try
        {
            partial = extend(partial, directive, algorithm);
        }
        catch (const Error &e)
        {
            throw Error(ErrorCode::KindMismatchUnconstructible, e.what(), i);
        }
        const auto &mo = partial.outcomes.back();
        if (mo.kind != oo.kind || mo.messages_sent.size() != oo.messages_sent.size())
            throw Error(ErrorCode::KindMismatchUnconstructible,
                        "step " + std::to_string(i) + " is " + std::string(to_string(oo.kind)) +
                            " in the original but " + std::string(to_string(mo.kind)) + " in the mirror",
                        i);
        for (std::size_t j = 0; j < mo.messages_sent.size(); ++j)
            counterpart[oo.messages_sent[j].tag] = mo.messages_sent[j].tag;
        schedule.push_back(partial.schedule.back());
    }
    return run(algorithm, inputs, schedule, original.context);
}

} // namespace sddsim
