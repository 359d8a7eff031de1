#include "sddsim/models.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace sddsim
{

std::string_view to_string(ModelKind kind) noexcept
{
    switch (kind)
    {
    case ModelKind::Async: return "async";
    case ModelKind::Synchronous: return "synchronous";
    case ModelKind::GST: return "gst";
    }
    return "async";
}

std::string_view to_string(AdmissibilityRule rule) noexcept
{
    switch (rule)
    {
    case AdmissibilityRule::CrashedActorStep: return "crashed-actor-step";
    case AdmissibilityRule::StepWindow: return "step-window";
    case AdmissibilityRule::DeliveryDeadline: return "delivery-deadline";
    }
    return "crashed-actor-step";
}

void validate(const ModelParams &params)
{
    switch (params.kind)
    {
    case ModelKind::Async: return;
    case ModelKind::Synchronous:
        if (!params.delta || !params.phi)
            throw Error(ErrorCode::ParamMismatch, "synchronous model needs delta and phi");
        break;
    case ModelKind::GST:
        if (!params.gst || !params.delta || !params.phi)
            throw Error(ErrorCode::ParamMismatch, "GST model needs gst, delta and phi");
        break;
    }
    if (*params.delta == 0 || *params.phi == 0)
        throw Error(ErrorCode::ParamMismatch, "delta and phi must be positive");
}

AdmissibilityReport check_admissible(const ExecutionPrefix &prefix, const ModelParams &params)
{
    validate(params);
    AdmissibilityReport report;
    const auto &pattern = prefix.context.pattern;
    const std::size_t horizon = prefix.horizon();

    for (std::size_t i = 0; i < horizon; ++i)
    {
        const auto actor = prefix.schedule[i].actor;
        if (pattern.crashed_at(actor, i))
            report.violations.push_back({i, AdmissibilityRule::CrashedActorStep, actor});
    }

    // tag -> (sent message, step index of its delivery)
    std::map<MessageTag, std::pair<MessageRecord, std::optional<TimeIndex>>> messages;
    for (std::size_t i = 0; i < prefix.outcomes.size(); ++i)
    {
        for (const auto &m : prefix.outcomes[i].messages_sent)
            messages[m.tag] = {m, std::nullopt};
        for (const auto &m : prefix.outcomes[i].delivered)
            messages[m.tag].second = i;
    }

    if (params.kind != ModelKind::Async)
    {
        const TimeIndex from = params.kind == ModelKind::GST ? *params.gst : 0;
        const TimeIndex phi = *params.phi;
        const TimeIndex delta = *params.delta;

        for (auto p : kProcesses)
        {
            for (TimeIndex w = from; w + phi <= horizon; ++w)
            {
                const TimeIndex end = w + phi - 1;
                if (pattern.crashed_at(p, end))
                    continue;
                bool stepped = false;
                for (TimeIndex i = w; i <= end && !stepped; ++i)
                    stepped = prefix.schedule[i].actor == p;
                if (!stepped)
                    report.violations.push_back({end, AdmissibilityRule::StepWindow, p});
            }
        }

        for (const auto &[tag, entry] : messages)
        {
            const auto &[m, delivered_at] = entry;
            const TimeIndex deadline = std::max(m.sent_at, from) + delta;
            if (deadline >= horizon || pattern.crashed_at(m.receiver, deadline))
                continue;
            if (!delivered_at || *delivered_at > deadline)
                report.violations.push_back({deadline, AdmissibilityRule::DeliveryDeadline, m.receiver});
        }
    }

    std::sort(report.violations.begin(), report.violations.end(), [](const Violation &a, const Violation &b) {
        return std::tie(a.index, a.rule, a.process) < std::tie(b.index, b.rule, b.process);
    });
    if (!report.violations.empty())
        report.verdict = AdmissibilityVerdict::Violated;

    for (const auto &[tag, entry] : messages)
        if (!entry.second && pattern.correct(entry.first.receiver))
            report.open_obligations.push_back({ObligationKind::UndeliveredMessage, entry.first.receiver, tag});
    for (auto p : kProcesses)
        if (pattern.correct(p))
            report.open_obligations.push_back({ObligationKind::StepsOwed, p, std::nullopt});
    return report;
}

std::optional<TimeIndex> last_checkable_gst(std::size_t horizon, const ModelParams &params)
{
    validate(params);
    if (params.kind == ModelKind::Async)
        return std::nullopt;
    const TimeIndex need = std::max(*params.phi, *params.delta + 1);
    if (horizon < need)
        return std::nullopt;
    return horizon - need;
}

FdValue encode_suspects(const std::vector<ProcessId> &suspected)
{
    const bool s = std::find(suspected.begin(), suspected.end(), ProcessId::Source) != suspected.end();
    const bool d = std::find(suspected.begin(), suspected.end(), ProcessId::Destination) != suspected.end();
    if (s && d)
        return "s,d";
    if (s)
        return "s";
    if (d)
        return "d";
    return "";
}

bool suspects(const FdValue &value, ProcessId p)
{
    const char wanted = p == ProcessId::Source ? 's' : 'd';
    return value.find(wanted) != FdValue::npos;
}

FDHistory perfect_fd_history(const FailurePattern &pattern, TimeIndex horizon)
{
    FDHistory h;
    h.domain_name = "P";
    for (TimeIndex t = 0; t <= horizon; ++t)
        for (auto p : kProcesses)
            if (!pattern.crashed_at(p, t))
                h.values[{p, t}] = encode_suspects(pattern.crashed(t));
    return h;
}

bool fd_history_consistent(const FailurePattern &pattern_a, const FDHistory &history_a,
                           const FailurePattern &pattern_b, const FDHistory &history_b)
{
    if (history_a.domain_name != history_b.domain_name)
        throw Error(ErrorCode::DomainMismatch, history_a.domain_name + " vs " + history_b.domain_name);
    return !(pattern_a == pattern_b) || history_a == history_b;
}

} // namespace sddsim
