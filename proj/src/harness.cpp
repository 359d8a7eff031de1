#include "sddsim/sdd.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <utility>

namespace sddsim
{

namespace
{

ScheduleGenerator destination_only_generator()
{
    ScheduleGenerator g;
    g.id = "destination-only";
    g.next = [](const Configuration &config, const FailureContext &ctx) -> std::optional<StepDirective> {
        if (!is_live(ctx, ProcessId::Destination, config.index))
            return std::nullopt;
        StepDirective d;
        d.actor = ProcessId::Destination;
        for (const auto &m : config.buffer(ProcessId::Destination))
            d.deliver.push_back(m.tag);
        return d;
    };
    return g;
}

// s sends at 0, d takes `replay` steps without deliveries, receives at
// replay + 1, then s and d alternate.
ScheduleGenerator withheld_message_generator(std::size_t replay)
{
    ScheduleGenerator g;
    g.id = "withheld-" + std::to_string(replay);
    g.next = [replay](const Configuration &config, const FailureContext &ctx) -> std::optional<StepDirective> {
        const auto i = config.index;
        StepDirective d;
        if (i == 0)
            d.actor = ProcessId::Source;
        else if (i <= replay)
            d.actor = ProcessId::Destination;
        else
            d.actor = (i - (replay + 1)) % 2 == 0 ? ProcessId::Destination : ProcessId::Source;
        if (!is_live(ctx, d.actor, i))
            return std::nullopt;
        if (i > replay)
            for (const auto &m : config.buffer(d.actor))
                d.deliver.push_back(m.tag);
        return d;
    };
    return g;
}

struct Observation
{
    std::vector<std::pair<ProcessId, Bytes>> delivered;
    std::optional<FdValue> fd;

    friend bool operator==(const Observation &, const Observation &) = default;
};

Observation observe(const StepOutcome &o)
{
    Observation obs;
    for (const auto &m : o.delivered)
        obs.delivered.emplace_back(m.sender, m.payload);
    obs.fd = o.fd_value;
    return obs;
}

std::vector<std::size_t> destination_steps(const ExecutionPrefix &p)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < p.schedule.size(); ++i)
        if (p.schedule[i].actor == ProcessId::Destination)
            out.push_back(i);
    return out;
}

const LocalState &d_state(const ExecutionPrefix &p, std::size_t k)
{
    return p.configurations[k].state(ProcessId::Destination);
}

bool c1_probes_pass(const AlgorithmSpec &algorithm, std::size_t horizon, const ExecutionPrefix &a0,
                    const ExecutionPrefix &a1)
{
    if (!is_c1_compliant(a0).compliant || !is_c1_compliant(a1).compliant)
        return false;
    for (auto input : {Bit::Zero, Bit::One})
        for (auto first : kProcesses)
        {
            const auto probe = run_generated(algorithm, Inputs{input, std::nullopt}, lockstep_generator(first),
                                             FailureContext{}, horizon);
            if (!is_c1_compliant(probe).compliant)
                return false;
        }
    return true;
}

std::string describe_decision(const ExecutionPrefix &p)
{
    const auto k = decision_time(p);
    if (!k)
        return "no decision";
    return "decides " + std::to_string(to_int(*d_state(p, *k).decision)) + " at C_" + std::to_string(*k);
}

} // namespace

bool ViewCertificate::holds() const
{
    return !entries.empty() && std::all_of(entries.begin(), entries.end(), [](const ViewEntry &e) {
        return e.state_equal && e.observation_equal;
    });
}

ViewCertificate certify_view(const NamedTrace &left, const NamedTrace &right, ViewAlignment alignment,
                             std::size_t through)
{
    ViewCertificate cert;
    cert.left = left.name;
    cert.right = right.name;
    cert.alignment = alignment;
    cert.through = through;
    const auto &a = left.trace;
    const auto &b = right.trace;

    if (alignment == ViewAlignment::ByIndex)
    {
        for (std::size_t i = 0; i <= through; ++i)
        {
            ViewEntry e{i, i, false, false};
            if (i < a.configurations.size() && i < b.configurations.size())
            {
                e.state_equal = d_state(a, i) == d_state(b, i);
                e.observation_equal = true;
                if (i < through && i < a.horizon() && i < b.horizon() &&
                    a.schedule[i].actor == ProcessId::Destination && b.schedule[i].actor == ProcessId::Destination)
                    e.observation_equal = observe(a.outcomes[i]) == observe(b.outcomes[i]);
            }
            cert.entries.push_back(e);
        }
        return cert;
    }

    const auto sa = destination_steps(a);
    const auto sb = destination_steps(b);
    cert.entries.push_back({0, 0, d_state(a, 0) == d_state(b, 0), true});
    for (std::size_t j = 0; j < through; ++j)
    {
        if (j >= sa.size() || j >= sb.size())
        {
            cert.entries.push_back({j < sa.size() ? sa[j] : a.horizon(), j < sb.size() ? sb[j] : b.horizon(), false,
                                    false});
            continue;
        }
        ViewEntry e{sa[j], sb[j], false, false};
        e.state_equal = d_state(a, sa[j] + 1) == d_state(b, sb[j] + 1);
        e.observation_equal = observe(a.outcomes[sa[j]]) == observe(b.outcomes[sb[j]]);
        cert.entries.push_back(e);
    }
    return cert;
}

const ExecutionPrefix &ImpossibilityReport::trace(std::string_view name) const
{
    for (const auto &t : scenario_traces)
        if (t.name == name)
            return t.trace;
    throw Error(ErrorCode::Trace, "report has no trace named " + std::string(name));
}

bool reverify(const ImpossibilityReport &report)
{
    auto named = [&](const std::string &name) -> const NamedTrace * {
        for (const auto &t : report.scenario_traces)
            if (t.name == name)
                return &t;
        return nullptr;
    };

    for (const auto &cert : report.certificates)
    {
        const auto *l = named(cert.left);
        const auto *r = named(cert.right);
        if (!l || !r)
            return false;
        const auto again = certify_view(*l, *r, cert.alignment, cert.through);
        if (!again.holds() || again.entries.size() != cert.entries.size())
            return false;
    }

    const auto *cited = named(report.cited_trace);
    if (!cited)
        return false;
    const auto verdict = check_sdd(cited->trace, report.interpretation);
    if (report.violated_property == "Validity")
        return verdict.validity.violated() && report.violation_index == verdict.validity.index;
    if (report.violated_property == "Integrity")
        return verdict.integrity.violated() && report.violation_index == verdict.integrity.index;
    if (report.violated_property == "Termination")
        return verdict.termination.kind == PropertyStatus::Kind::Pending &&
               cited->trace.context.pattern.correct(ProcessId::Destination);
    return false;
}

ImpossibilityReport theorem3_quadruple(const AlgorithmSpec &algorithm, const ModelParams &params,
                                       const Theorem3Options &options)
{
    validate(params);
    const auto H = options.horizon;
    const FailureContext s_down{FailurePattern::crash(ProcessId::Source, 0), std::nullopt};
    std::ostringstream story;

    AlgorithmSpec alg = algorithm;
    auto alpha0 = run_generated(alg, Inputs{Bit::Zero, std::nullopt}, destination_only_generator(), s_down, H);
    auto alpha1 = run_generated(alg, Inputs{Bit::One, std::nullopt}, destination_only_generator(), s_down, H);
    if (!c1_probes_pass(alg, H, alpha0, alpha1))
    {
        alg = c1_transform(algorithm);
        story << algorithm.name << " is not in (C1) normal form on the probe runs; analysed as " << alg.name
              << ".\n";
        alpha0 = run_generated(alg, Inputs{Bit::Zero, std::nullopt}, destination_only_generator(), s_down, H);
        alpha1 = run_generated(alg, Inputs{Bit::One, std::nullopt}, destination_only_generator(), s_down, H);
        if (!c1_probes_pass(alg, H, alpha0, alpha1))
            throw Error(ErrorCode::NotC1Compliant, alg.name + " still violates (C1) on the probe runs");
    }

    ImpossibilityReport report;
    report.harness = "theorem3";
    report.interpretation = InitialCrashInterpretation::ByFailurePattern;
    report.scenario_traces.push_back({"alpha_0", alpha0});
    report.scenario_traces.push_back({"alpha_1", alpha1});

    const auto k0 = decision_time(alpha0);
    if (!k0)
    {
        const auto search = liveness_extendable(termination_monitor(), alpha0, alg, params, options.extension_budget);
        if (search.found)
            throw Error(ErrorCode::NoDecisionWithinHorizon,
                        "d decides only after index " + std::to_string(H) + "; raise the horizon");
        report.violated_property = "Termination";
        report.cited_trace = "alpha_0";
        report.certificates.push_back(certify_view(report.scenario_traces[0], report.scenario_traces[1],
                                                   ViewAlignment::ByIndex, H));
        story << "With s initially crashed d takes " << H << " steps without deciding, and no admissible extension"
              << " of at most " << options.extension_budget << " further steps (" << search.explored
              << " explored) makes it decide. d is correct, so Termination fails.\n";
        report.narrative = story.str();
        return report;
    }

    const Bit w = *d_state(alpha0, *k0).decision;
    const std::size_t n = *k0;
    report.certificates.push_back(
        certify_view(report.scenario_traces[0], report.scenario_traces[1], ViewAlignment::ByIndex, *k0));
    story << "alpha_0 and alpha_1: s initially crashed, d steps alone and " << describe_decision(alpha0)
          << " after " << n << " own steps in both; its view cannot depend on the input.\n";

    if (H < n + 3)
        throw Error(ErrorCode::NoDecisionWithinHorizon, "horizon too short to deliver the withheld message");

    const auto prime0 = run_generated(alg, Inputs{Bit::Zero, std::nullopt}, withheld_message_generator(n),
                                      FailureContext{}, H);
    const auto prime1 = run_generated(alg, Inputs{Bit::One, std::nullopt}, withheld_message_generator(n),
                                      FailureContext{}, H);

    auto check_params = params;
    if (params.kind == ModelKind::GST)
        check_params.gst = n + 1;
    const auto adm = check_admissible(prime0, check_params);
    if (adm.violated())
    {
        const auto v = *adm.first();
        throw Error(ErrorCode::BoundedDecisionTime,
                    "withholding s's message for " + std::to_string(n) + " of d's steps breaks the " +
                        std::string(to_string(v.rule)) + " rule for " + std::string(to_string(v.process)) +
                        " at index " + std::to_string(v.index) + " in the " +
                        std::string(to_string(params.kind)) + " model",
                    v.index);
    }

    report.scenario_traces.push_back({"alpha_0'", prime0});
    report.scenario_traces.push_back({"alpha_1'", prime1});
    report.certificates.push_back(
        certify_view(report.scenario_traces[0], report.scenario_traces[2], ViewAlignment::ByOwnStep, n));
    report.certificates.push_back(
        certify_view(report.scenario_traces[1], report.scenario_traces[3], ViewAlignment::ByOwnStep, n));

    const std::string cited = w == Bit::Zero ? "alpha_1'" : "alpha_0'";
    const auto &bad = w == Bit::Zero ? prime1 : prime0;
    const auto verdict = check_sdd(bad, report.interpretation);
    report.violated_property = "Validity";
    report.cited_trace = cited;
    if (verdict.validity.violated())
        report.violation_index = verdict.validity.index;

    story << "alpha_0' and alpha_1': s is correct and sends in its first step; the message stays in transit while"
          << " d repeats its first " << n << " steps, and is received at index " << n + 1 << ".";
    if (params.kind == ModelKind::GST)
        story << " Both are admissible with gst = " << n + 1 << ".";
    story << "\nd cannot tell alpha_v' from alpha_v through those steps, so it " << describe_decision(bad) << " in "
          << cited << " whose input is " << to_int(flip(w)) << ": Validity is violated.\n";
    report.narrative = story.str();
    return report;
}

FdHistorySource perfect_fd_source()
{
    return [](const FailurePattern &pattern, TimeIndex horizon) { return perfect_fd_history(pattern, horizon); };
}

FdHistorySource random_fd_source(std::uint64_t seed)
{
    return [seed](const FailurePattern &pattern, TimeIndex horizon) {
        static const std::vector<FdValue> kValues{"", "s", "d", "s,d"};
        std::seed_seq base{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(pattern.crash_of(ProcessId::Source).value_or(~0ull)),
                           static_cast<std::uint32_t>(pattern.crash_of(ProcessId::Destination).value_or(~0ull))};
        std::array<std::uint32_t, 2> key{};
        base.generate(key.begin(), key.end());
        FDHistory h;
        h.domain_name = "random-table";
        for (auto p : kProcesses)
            for (TimeIndex t = 0; t <= horizon; ++t)
            {
                if (pattern.crashed_at(p, t))
                    continue;
                // one engine per entry so a value never depends on the horizon
                std::seed_seq entry{key[0], key[1], static_cast<std::uint32_t>(slot(p)), static_cast<std::uint32_t>(t)};
                std::mt19937 engine(entry);
                std::uniform_int_distribution<std::size_t> pick(0, kValues.size() - 1);
                h.values[{p, t}] = kValues[pick(engine)];
            }
        return h;
    };
}

namespace
{

struct DecidingPair
{
    ExecutionPrefix run0;
    ExecutionPrefix run1;
    TimeIndex decided_at = 0;
    Bit value = Bit::Zero;
};

// d steps alone at every index under the given context; grows the horizon
// until d decides in both runs.
DecidingPair destination_alone(const AlgorithmSpec &algorithm, const FailureContext &ctx, std::size_t horizon,
                               std::size_t cap)
{
    std::size_t h = std::max<std::size_t>(horizon, 1);
    while (true)
    {
        DecidingPair pair{
            run_generated(algorithm, Inputs{Bit::Zero, std::nullopt}, destination_only_generator(), ctx, h),
            run_generated(algorithm, Inputs{Bit::One, std::nullopt}, destination_only_generator(), ctx, h)};
        const auto k0 = decision_time(pair.run0);
        const auto k1 = decision_time(pair.run1);
        if (k0 && k1)
        {
            pair.decided_at = std::max(*k0, *k1);
            pair.value = *d_state(pair.run0, *k0).decision;
            return pair;
        }
        if (h >= cap)
            throw Error(ErrorCode::NoDecisionWithinHorizon,
                        "d does not decide within " + std::to_string(cap) + " steps while s is silent");
        h = std::min(h * 2, cap);
    }
}

ScheduleGenerator slot_generator(const ExecutionPrefix &base, TimeIndex slot_index, TimeIndex decided_at)
{
    ScheduleGenerator g;
    g.id = "slot-" + std::to_string(slot_index);
    g.next = [actors = std::vector<StepDirective>(base.schedule), slot_index,
              decided_at](const Configuration &config, const FailureContext &ctx) -> std::optional<StepDirective> {
        const auto i = config.index;
        StepDirective d;
        d.actor = i == slot_index ? ProcessId::Source
                                  : (i < actors.size() ? actors[i].actor : ProcessId::Destination);
        if (!is_live(ctx, d.actor, i))
            return std::nullopt;
        if (d.actor == ProcessId::Destination && i > decided_at)
            for (const auto &m : config.buffer(d.actor))
                d.deliver.push_back(m.tag);
        return d;
    };
    return g;
}

} // namespace

ImpossibilityReport fd_impossibility_pattern_interp(const AlgorithmSpec &algorithm, const FdHistorySource &source,
                                                    const FdHarnessOptions &options)
{
    std::ostringstream story;
    const TimeIndex first_tc = std::max<TimeIndex>(options.crash_time, 1);
    for (TimeIndex tc = first_tc; tc + 2 <= options.horizon_cap; ++tc)
    {
        const auto pattern = FailurePattern::crash(ProcessId::Source, tc);
        const FailureContext ctx{pattern, source(pattern, options.horizon_cap)};
        const auto pair = destination_alone(algorithm, ctx, std::max(options.horizon, tc + 2), options.horizon_cap);
        const auto td = pair.decided_at;
        const Bit w = pair.value;
        const auto &base = w == Bit::Zero ? pair.run1 : pair.run0;

        for (TimeIndex i = tc; i-- > 0;)
        {
            const std::size_t h = std::max({base.horizon(), i + 3, td + 3});
            const auto prime = run_generated(algorithm, base.inputs, slot_generator(base, i, td), ctx, h);
            const NamedTrace lhs{"alpha_" + std::to_string(to_int(flip(w))), base};
            const NamedTrace rhs{"alpha'", prime};
            auto cert = certify_view(lhs, rhs, ViewAlignment::ByIndex, td);
            if (!cert.holds() || decision_time(prime) != decision_time(base))
                continue;

            ImpossibilityReport report;
            report.harness = "fd-pattern";
            report.interpretation = InitialCrashInterpretation::ByFailurePattern;
            report.scenario_traces.push_back({"alpha_0", pair.run0});
            report.scenario_traces.push_back({"alpha_1", pair.run1});
            report.scenario_traces.push_back(rhs);
            report.certificates.push_back(certify_view(report.scenario_traces[0], report.scenario_traces[1],
                                                       ViewAlignment::ByIndex, td));
            report.certificates.push_back(std::move(cert));
            const auto verdict = check_sdd(prime, report.interpretation);
            report.violated_property = "Validity";
            report.cited_trace = "alpha'";
            if (verdict.validity.violated())
                report.violation_index = verdict.validity.index;

            if (tc != first_tc)
                story << "No step of d before t_c = " << tc - 1 << " could be traded for a step of s without changing"
                      << " d's view; the crash time was moved to " << tc << ".\n";
            story << "Failure pattern: s crashes at t_c = " << tc << ", d is correct; history domain "
                  << (ctx.history ? ctx.history->domain_name : std::string("none"))
                  << ", the same history in all three runs.\n"
                  << "alpha_0 and alpha_1: s takes no step, d steps at every index and " << describe_decision(pair.run0)
                  << " (t_d = " << td << ") in both.\n"
                  << "alpha': input " << to_int(flip(w)) << ", s takes its single step at index " << i
                  << " and sends its input; the message is received after t_d. s is not initially crashed under"
                  << " this pattern, and d " << describe_decision(prime) << ": Validity is violated.\n";
            report.narrative = story.str();
            return report;
        }
    }
    throw Error(ErrorCode::NoIndistinguishableSlot,
                "no crash time up to " + std::to_string(options.horizon_cap) +
                    " leaves room for an indistinguishable step of s");
}

ImpossibilityReport fd_impossibility_step_interp(const AlgorithmSpec &algorithm, const FdHistorySource &source,
                                                 const FdHarnessOptions &options)
{
    const TimeIndex tc = options.crash_time;
    const auto pattern = FailurePattern::crash(ProcessId::Source, tc);
    const FailureContext ctx{pattern, source(pattern, options.horizon_cap)};
    const auto pair = destination_alone(algorithm, ctx, std::max(options.horizon, tc + 1), options.horizon_cap);
    const auto td = pair.decided_at;
    const Bit w = pair.value;

    ImpossibilityReport report;
    report.harness = "fd-step";
    report.interpretation = InitialCrashInterpretation::ByFailurePattern;
    report.scenario_traces.push_back({"beta_0", pair.run0});
    report.scenario_traces.push_back({"beta_1", pair.run1});
    report.certificates.push_back(
        certify_view(report.scenario_traces[0], report.scenario_traces[1], ViewAlignment::ByIndex, td));

    const std::string cited = w == Bit::Zero ? "beta_1" : "beta_0";
    const auto &bad = w == Bit::Zero ? pair.run1 : pair.run0;
    const auto by_pattern = check_sdd(bad, InitialCrashInterpretation::ByFailurePattern);
    const auto by_steps = check_sdd(bad, InitialCrashInterpretation::ByStepActivity);
    report.violated_property = "Validity";
    report.cited_trace = cited;
    if (by_pattern.validity.violated())
        report.violation_index = by_pattern.validity.index;

    std::ostringstream story;
    story << "Failure pattern: s crashes at t_c = " << tc << " without ever taking a step; d steps at every index"
          << " and " << describe_decision(pair.run0) << " (t_d = " << td << ") for both inputs.\n"
          << "s is alive at 0.." << (tc == 0 ? 0 : tc - 1) << ", so by the failure pattern it is not initially"
          << " crashed and Validity in " << cited << " is " << to_string(by_pattern.validity) << ".\n"
          << "Reading \"initially crashed\" as \"takes no step\" instead, s counts as initially crashed and Validity"
          << " in " << cited << " is " << to_string(by_steps.validity) << "; the contradiction rests on the"
          << " failure-pattern reading.\n";
    report.narrative = story.str();
    return report;
}

} // namespace sddsim
