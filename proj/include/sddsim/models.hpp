#pragma once

// Admissibility for the asynchronous, synchronous and GST models, evaluated on
// finite prefixes: safety clauses can be violated, liveness clauses only ever
// remain open.

#include "sddsim/kernel.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sddsim
{

enum class ModelKind
{
    Async,
    Synchronous,
    GST,
};

std::string_view to_string(ModelKind kind) noexcept;

struct ModelParams
{
    ModelKind kind = ModelKind::Async;
    std::optional<TimeIndex> gst;
    /// Delivery bound once synchronous: a message is received at most delta
    /// ticks after max(sent_at, gst).
    std::optional<TimeIndex> delta;
    /// Step bound once synchronous: every live process steps in every window of
    /// phi consecutive ticks.
    std::optional<TimeIndex> phi;

    static ModelParams async() { return {}; }
    /// c = 1, p = 1 in the partial-synchrony classification.
    static ModelParams synchronous(TimeIndex delta = 1, TimeIndex phi = 2)
    {
        return {ModelKind::Synchronous, std::nullopt, delta, phi};
    }
    static ModelParams gst_model(TimeIndex gst, TimeIndex delta = 1, TimeIndex phi = 2)
    {
        return {ModelKind::GST, gst, delta, phi};
    }

    friend bool operator==(const ModelParams &, const ModelParams &) = default;
};

enum class AdmissibilityRule
{
    CrashedActorStep,
    StepWindow,
    DeliveryDeadline,
};

std::string_view to_string(AdmissibilityRule rule) noexcept;

struct Violation
{
    TimeIndex index = 0;
    AdmissibilityRule rule = AdmissibilityRule::CrashedActorStep;
    ProcessId process = ProcessId::Source;

    friend bool operator==(const Violation &, const Violation &) = default;
};

enum class ObligationKind
{
    UndeliveredMessage,
    StepsOwed,
};

struct Obligation
{
    ObligationKind kind = ObligationKind::StepsOwed;
    ProcessId process = ProcessId::Source;
    std::optional<MessageTag> tag;
};

enum class AdmissibilityVerdict
{
    Violated,
    CompliantSoFar,
};

struct AdmissibilityReport
{
    AdmissibilityVerdict verdict = AdmissibilityVerdict::CompliantSoFar;
    /// Sorted by index.
    std::vector<Violation> violations;
    std::vector<Obligation> open_obligations;

    bool violated() const noexcept { return verdict == AdmissibilityVerdict::Violated; }
    std::optional<Violation> first() const
    {
        if (violations.empty())
            return std::nullopt;
        return violations.front();
    }
};

/// Throws ParamMismatch when the params lack a field their kind requires.
void validate(const ModelParams &params);

AdmissibilityReport check_admissible(const ExecutionPrefix &prefix, const ModelParams &params);

/// Largest gst for which the window and deadline clauses are fully decidable on
/// a prefix of the given horizon (a window of phi ticks and a deadline of
/// delta ticks past gst must both fit inside the prefix).
std::optional<TimeIndex> last_checkable_gst(std::size_t horizon, const ModelParams &params);

/// q is suspected by every querier at t iff q has crashed by t.
FDHistory perfect_fd_history(const FailurePattern &pattern, TimeIndex horizon);

/// Encodes a set of suspected processes: "", "s", "d" or "s,d".
FdValue encode_suspects(const std::vector<ProcessId> &suspects);
bool suspects(const FdValue &value, ProcessId p);

/// Histories may only depend on the failure pattern: equal patterns must come
/// with equal histories. Throws DomainMismatch for different domains.
bool fd_history_consistent(const FailurePattern &pattern_a, const FDHistory &history_a,
                           const FailurePattern &pattern_b, const FDHistory &history_b);

} // namespace sddsim
