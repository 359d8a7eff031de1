#include "sddsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <utility>

namespace sddsim
{

std::string to_string(const MetricResult &m)
{
    if (m.zero)
        return "Exact(0)";
    const std::string value = "2^-" + std::to_string(m.exponent);
    return m.is_exact() ? "Exact(" + value + ")" : "AtMost(" + value + ")";
}

std::string_view to_string(Membership m) noexcept
{
    switch (m)
    {
    case Membership::In: return "in";
    case Membership::Out: return "out";
    case Membership::Unknown: return "unknown";
    }
    return "unknown";
}

int compare_pow2(unsigned n, const Dyadic &value)
{
    // 2^-n vs m * 2^-e  <=>  2^(e-n) vs m
    if (value.exponent < n)
        return -1;
    const unsigned shift = value.exponent - n;
    if (shift >= 64)
        return 1;
    const std::uint64_t lhs = std::uint64_t{1} << shift;
    return lhs < value.mantissa ? -1 : (lhs == value.mantissa ? 0 : 1);
}

namespace
{

template <typename Seq, typename Eq>
MetricResult metric_generic(const Seq &a, const Seq &b, std::optional<std::uint64_t> pa,
                            std::optional<std::uint64_t> pb, Eq eq)
{
    if (a.empty() || b.empty())
        throw Error(ErrorCode::EmptyPrefix, "metric needs nonempty prefixes");
    const std::size_t common = std::min(a.size(), b.size());
    for (std::size_t n = 0; n < common; ++n)
        if (!eq(a[n], b[n]))
            return MetricResult::exact(static_cast<unsigned>(n));
    if (pa && pb && *pa == *pb)
        return MetricResult::exact_zero();
    return MetricResult::at_most(static_cast<unsigned>(common));
}

} // namespace

MetricResult metric_prefix(const ExecutionPrefix &a, const ExecutionPrefix &b)
{
    return metric_generic(a.configurations, b.configurations, a.provenance, b.provenance,
                          [](const Configuration &x, const Configuration &y) { return x == y; });
}

MetricResult metric_digests(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                            std::optional<std::uint64_t> provenance_a, std::optional<std::uint64_t> provenance_b)
{
    return metric_generic(a, b, provenance_a, provenance_b, [](std::uint64_t x, std::uint64_t y) { return x == y; });
}

Membership ball_membership(const MetricResult &distance, const Dyadic &epsilon)
{
    if (epsilon.mantissa == 0)
        throw Error(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
    if (distance.zero)
        return Membership::In;
    const bool below = compare_pow2(distance.exponent, epsilon) < 0;
    if (below)
        return Membership::In;
    return distance.is_exact() ? Membership::Out : Membership::Unknown;
}

Membership ball_membership(const ExecutionPrefix &center, const Dyadic &epsilon, const ExecutionPrefix &candidate)
{
    if (epsilon.mantissa == 0)
        throw Error(ErrorCode::NonPositiveEpsilon, "epsilon must be positive");
    return ball_membership(metric_prefix(center, candidate), epsilon);
}

ConvergenceProfile convergence_profile(const ExecutionFamily &family, const ExecutionPrefix &limit, std::size_t k_max)
{
    constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max();
    ConvergenceProfile profile;
    std::vector<std::size_t> agreement;
    for (std::size_t k = 0; k <= k_max; ++k)
    {
        const auto member = family.generator(k);
        const auto m = metric_prefix(member, limit);
        profile.entries.emplace(k, m);
        agreement.push_back(m.agreement().value_or(kInfinite));
    }

    std::size_t record = 0;
    for (std::size_t k = 0; k < agreement.size(); ++k)
    {
        if (k == 0 || agreement[k] > record)
        {
            profile.increasing.push_back(k);
            record = agreement[k];
        }
    }

    std::vector<std::size_t> tail_min(agreement.size());
    std::size_t running = kInfinite;
    for (std::size_t k = agreement.size(); k-- > 0;)
    {
        running = std::min(running, agreement[k]);
        tail_min[k] = running;
    }
    bool converging = k_max >= 1 || agreement.front() == kInfinite;
    for (std::size_t k = 0; k + 1 < tail_min.size() && converging; ++k)
        converging = tail_min[k] == kInfinite || tail_min[k + 1] > tail_min[k];
    profile.converging = converging;
    return profile;
}

namespace
{

ModelParams member_params(const ExecutionFamily &family, const ModelParams &params, std::size_t k)
{
    if (params.kind == ModelKind::GST && family.params_for)
    {
        auto p = family.params_for(k);
        if (p.kind == ModelKind::GST)
            return p;
    }
    return params;
}

// Returns the rule that refutes the limit, or nothing if the limit is admissible
// for some model instance that is decidable within its horizon.
std::optional<std::pair<AdmissibilityRule, std::optional<TimeIndex>>> refute_limit(const ExecutionPrefix &limit,
                                                                                    const ModelParams &params)
{
    if (params.kind != ModelKind::GST)
    {
        const auto report = check_admissible(limit, params);
        if (!report.violated())
            return std::nullopt;
        return std::make_pair(report.first()->rule, std::optional<TimeIndex>{});
    }
    const auto last = last_checkable_gst(limit.horizon(), params);
    if (!last)
        return std::nullopt;
    AdmissibilityRule rule = AdmissibilityRule::StepWindow;
    for (TimeIndex g = 0; g <= *last; ++g)
    {
        auto p = params;
        p.gst = g;
        const auto report = check_admissible(limit, p);
        if (!report.violated())
            return std::nullopt;
        rule = report.first()->rule;
    }
    return std::make_pair(rule, std::optional<TimeIndex>{*last});
}

} // namespace

std::optional<NonClosedWitness> closure_witness(const ExecutionFamily &family, const ExecutionPrefix &limit,
                                                const ModelParams &params, std::size_t k_max)
{
    validate(params);
    const auto profile = convergence_profile(family, limit, k_max);
    if (!profile.converging)
        throw Error(ErrorCode::NotConverging, "family does not converge to the limit at this horizon");

    NonClosedWitness witness;
    for (std::size_t k = 0; k <= k_max; ++k)
    {
        const auto member = family.generator(k);
        if (check_admissible(member, member_params(family, params, k)).violated())
            return std::nullopt;
        const auto &m = profile.entries.at(k);
        witness.distances.emplace(k, m);
        witness.agreement.emplace(k, m.agreement().value_or(limit.configurations.size()));
    }

    const auto refuted = refute_limit(limit, params);
    if (!refuted)
        return std::nullopt;
    witness.family = family;
    witness.limit = limit;
    witness.limit_violation = refuted->first;
    witness.checked_gst_max = refuted->second;
    return witness;
}

bool revalidate_witness(const NonClosedWitness &witness, const ModelParams &params)
{
    if (witness.agreement.empty())
        return false;
    std::optional<std::size_t> previous;
    for (const auto &[k, stored] : witness.agreement)
    {
        const auto member = witness.family.generator(k);
        const auto m = metric_prefix(member, witness.limit);
        if (!(m == witness.distances.at(k)))
            return false;
        if (m.agreement().value_or(witness.limit.configurations.size()) != stored)
            return false;
        if (previous && stored <= *previous)
            return false;
        previous = stored;
        if (check_admissible(member, member_params(witness.family, params, k)).violated())
            return false;
    }
    const auto refuted = refute_limit(witness.limit, params);
    return refuted.has_value() && refuted->first == witness.limit_violation &&
           refuted->second == witness.checked_gst_max;
}

bool monitor_is_prefix_stable(const PropertyMonitor &monitor, std::span<const PrefixWithExtensions> prefixes)
{
    for (const auto &entry : prefixes)
    {
        const auto verdict = monitor.classify(entry.prefix);
        if (verdict.kind != MonitorVerdict::Kind::ViolatedAt)
            continue;
        for (const auto &ext : entry.extensions)
            if (!(monitor.classify(ext) == verdict))
                return false;
    }
    return true;
}

ExtensionResult liveness_extendable(const PropertyMonitor &monitor, const ExecutionPrefix &prefix,
                                    const AlgorithmSpec &algorithm, const ModelParams &params, std::size_t budget)
{
    validate(params);
    ExtensionResult result;
    result.budget = budget;
    if (monitor.classify(prefix).kind == MonitorVerdict::Kind::Satisfied)
    {
        result.found = true;
        return result;
    }

    struct Node
    {
        ExecutionPrefix prefix;
        std::vector<StepDirective> suffix;
    };
    std::deque<Node> frontier;
    frontier.push_back({prefix, {}});
    while (!frontier.empty())
    {
        Node node = std::move(frontier.front());
        frontier.pop_front();
        if (node.suffix.size() >= budget)
            continue;
        for (const auto &directive : candidate_directives(node.prefix.last(), node.prefix.context))
        {
            auto next = extend(node.prefix, directive, algorithm);
            if (check_admissible(next, params).violated())
                continue;
            ++result.explored;
            auto suffix = node.suffix;
            suffix.push_back(directive);
            if (monitor.classify(next).kind == MonitorVerdict::Kind::Satisfied)
            {
                result.found = true;
                result.suffix = std::move(suffix);
                return result;
            }
            frontier.push_back({std::move(next), std::move(suffix)});
        }
    }
    return result;
}

} // namespace sddsim
