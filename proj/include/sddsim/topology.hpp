#pragma once

// The prefix metric d(a, b) = 2^-N (N the first index where the configurations
// differ) evaluated honestly on finite prefixes, plus balls, convergence of
// execution families, closure witnesses and property monitors.

#include "sddsim/kernel.hpp"
#include "sddsim/models.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sddsim
{

/// Exact(2^-N), Exact(0), or AtMost(2^-L) when the compared prefixes agree on
/// their whole common length L. Values are kept as exponents, never as floats.
struct MetricResult
{
    enum class Kind
    {
        Exact,
        AtMost,
    };

    Kind kind = Kind::Exact;
    bool zero = false;
    unsigned exponent = 0;

    static MetricResult exact(unsigned n) { return {Kind::Exact, false, n}; }
    static MetricResult exact_zero() { return {Kind::Exact, true, 0}; }
    static MetricResult at_most(unsigned n) { return {Kind::AtMost, false, n}; }

    bool is_exact() const noexcept { return kind == Kind::Exact; }

    /// Guaranteed length of the common prefix; nullopt means the executions are
    /// equal. For Exact(2^-N) this is exactly N, for AtMost(2^-L) a lower bound.
    std::optional<std::size_t> agreement() const
    {
        if (zero)
            return std::nullopt;
        return exponent;
    }

    friend bool operator==(const MetricResult &, const MetricResult &) = default;
};

std::string to_string(const MetricResult &m);

/// Positive dyadic rational mantissa * 2^-exponent.
struct Dyadic
{
    std::uint64_t mantissa = 1;
    unsigned exponent = 0;

    static Dyadic pow2(unsigned n) { return {1, n}; }
};

/// Sign of 2^-n compared with the dyadic: -1 less, 0 equal, +1 greater.
int compare_pow2(unsigned n, const Dyadic &value);

MetricResult metric_prefix(const ExecutionPrefix &a, const ExecutionPrefix &b);

/// Same rule on digest sequences, as stored in serialized traces.
MetricResult metric_digests(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                            std::optional<std::uint64_t> provenance_a, std::optional<std::uint64_t> provenance_b);

enum class Membership
{
    In,
    Out,
    Unknown,
};

std::string_view to_string(Membership m) noexcept;

Membership ball_membership(const MetricResult &distance, const Dyadic &epsilon);
Membership ball_membership(const ExecutionPrefix &center, const Dyadic &epsilon, const ExecutionPrefix &candidate);

struct ExecutionFamily
{
    std::function<ExecutionPrefix(std::size_t)> generator;
    std::function<std::size_t(std::size_t)> family_horizon;
    /// Model instance each member is admissible in (GST members each carry
    /// their own stabilization time). Optional.
    std::function<ModelParams(std::size_t)> params_for;
    std::string description;
};

struct ConvergenceProfile
{
    std::map<std::size_t, MetricResult> entries;
    /// The tail minimum of the guaranteed agreement length strictly increases
    /// with k until it becomes infinite.
    bool converging = false;
    /// Members at which the running agreement record strictly increases.
    std::vector<std::size_t> increasing;
};

ConvergenceProfile convergence_profile(const ExecutionFamily &family, const ExecutionPrefix &limit, std::size_t k_max);

struct NonClosedWitness
{
    ExecutionFamily family;
    ExecutionPrefix limit;
    std::map<std::size_t, std::size_t> agreement;
    std::map<std::size_t, MetricResult> distances;
    AdmissibilityRule limit_violation = AdmissibilityRule::StepWindow;
    /// Every stabilization time 0..checked_gst_max was refuted on the limit
    /// (GST models only).
    std::optional<TimeIndex> checked_gst_max;
};

/// A converging family of admissible members whose limit is inadmissible.
/// For GST params the limit must fail for every gst that is decidable within
/// its horizon. Throws NotConverging.
std::optional<NonClosedWitness> closure_witness(const ExecutionFamily &family, const ExecutionPrefix &limit,
                                                const ModelParams &params, std::size_t k_max);

/// Re-derives the witness from scratch: regenerates each member, recomputes
/// distances and rechecks admissibility of members and limit.
bool revalidate_witness(const NonClosedWitness &witness, const ModelParams &params);

struct MonitorVerdict
{
    enum class Kind
    {
        ViolatedAt,
        Satisfied,
        Pending,
    };

    Kind kind = Kind::Pending;
    TimeIndex index = 0;

    static MonitorVerdict violated_at(TimeIndex i) { return {Kind::ViolatedAt, i}; }
    static MonitorVerdict satisfied() { return {Kind::Satisfied, 0}; }
    static MonitorVerdict pending() { return {Kind::Pending, 0}; }

    friend bool operator==(const MonitorVerdict &, const MonitorVerdict &) = default;
};

struct PropertyMonitor
{
    std::string name;
    std::function<MonitorVerdict(const ExecutionPrefix &)> classify;
};

struct PrefixWithExtensions
{
    ExecutionPrefix prefix;
    std::vector<ExecutionPrefix> extensions;
};

/// ViolatedAt verdicts must survive every supplied extension unchanged.
bool monitor_is_prefix_stable(const PropertyMonitor &monitor, std::span<const PrefixWithExtensions> prefixes);

struct ExtensionResult
{
    bool found = false;
    std::vector<StepDirective> suffix;
    std::size_t explored = 0;
    std::size_t budget = 0;
};

/// Breadth-first search over admissible schedule suffixes of at most `budget`
/// steps for one that makes the monitor report Satisfied.
ExtensionResult liveness_extendable(const PropertyMonitor &monitor, const ExecutionPrefix &prefix,
                                    const AlgorithmSpec &algorithm, const ModelParams &params, std::size_t budget);

} // namespace sddsim
