#include "sddsim/enumerate.hpp"

#include <optional>

namespace sddsim
{

std::vector<FailurePattern> crash_patterns(std::string_view spec, std::size_t horizon)
{
    if (spec == "none")
        return {FailurePattern::none()};
    if (spec != "all")
        throw Error(ErrorCode::Config, "unknown crash pattern set '" + std::string(spec) + "'");
    std::vector<std::optional<TimeIndex>> times{std::nullopt};
    for (TimeIndex t = 0; t < horizon; ++t)
        times.emplace_back(t);
    std::vector<FailurePattern> out;
    for (const auto &cs : times)
        for (const auto &cd : times)
        {
            FailurePattern f;
            f.crash_time = {cs, cd};
            out.push_back(f);
        }
    return out;
}

namespace
{

FailureContext context_for(const EnumerationConfig &config, const FailurePattern &pattern)
{
    FailureContext ctx{pattern, std::nullopt};
    if (config.fd_source)
        ctx.history = config.fd_source(pattern, config.horizon);
    return ctx;
}

// Returns false to stop the walk early.
bool walk(const EnumerationConfig &config, const ExecutionPrefix &node,
          const std::function<bool(const ExecutionPrefix &, bool)> &visit)
{
    if (node.horizon() >= config.horizon)
        return visit(node, true);
    const auto choices = candidate_directives(node.last(), node.context);
    if (choices.empty())
        return visit(node, true);
    if (!visit(node, false))
        return false;
    for (const auto &directive : choices)
    {
        auto child = extend(node, directive, config.algorithm);
        if (check_admissible(child, config.params).violated())
            continue;
        if (!walk(config, child, visit))
            return false;
    }
    return true;
}

void walk_all(const EnumerationConfig &config, const std::function<bool(const ExecutionPrefix &, bool)> &visit)
{
    validate(config.params);
    if (config.horizon < 1)
        throw Error(ErrorCode::Config, "horizon must be at least 1");
    for (auto input : config.inputs)
        for (const auto &pattern : config.patterns)
        {
            const auto root = run(config.algorithm, Inputs{input, std::nullopt}, {}, context_for(config, pattern));
            if (check_admissible(root, config.params).violated())
                continue;
            if (!walk(config, root, visit))
                return;
        }
}

} // namespace

void visit_schedules(const EnumerationConfig &config, const NodeVisitor &visit)
{
    walk_all(config, [&](const ExecutionPrefix &node, bool leaf) {
        visit(node, leaf);
        return true;
    });
}

std::size_t count_schedules(const EnumerationConfig &config, std::size_t limit)
{
    std::size_t count = 0;
    walk_all(config, [&](const ExecutionPrefix &, bool leaf) {
        if (leaf)
            ++count;
        return limit == 0 || count <= limit;
    });
    return count;
}

EnumerationSummary enumerate_schedules(const EnumerationConfig &config)
{
    if (config.budget > 0)
    {
        const auto count = count_schedules(config, config.budget);
        if (count > config.budget)
            throw Error(ErrorCode::BudgetExceeded, "more than " + std::to_string(config.budget) +
                                                       " admissible schedules at horizon " +
                                                       std::to_string(config.horizon));
    }

    EnumerationSummary summary;
    visit_schedules(config, [&](const ExecutionPrefix &node, bool leaf) {
        if (!leaf)
            return;
        const auto ordinal = summary.schedules_explored++;
        const auto verdict = check_sdd(node, config.interpretation);
        ++summary.verdict_histogram[verdict.category()];
        if (node.context.pattern.correct(ProcessId::Destination) &&
            verdict.termination.kind == PropertyStatus::Kind::Pending)
            ++summary.undecided_correct;
        if (!verdict.any_violation())
            return;
        ++summary.violations;
        if (summary.counterexamples.size() < config.keep_counterexamples)
            summary.counterexamples.push_back({ordinal, node, verdict});
    });
    return summary;
}

} // namespace sddsim
