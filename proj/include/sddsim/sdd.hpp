#pragma once

// Strongly dependent decision: property checkers, the adversarial constructions
// on (C1) algorithms and the failure-detector impossibility harnesses.

#include "sddsim/kernel.hpp"
#include "sddsim/models.hpp"
#include "sddsim/topology.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sddsim
{

enum class InitialCrashInterpretation
{
    /// s is initially crashed iff s is in F(t) for every t (crash time 0).
    ByFailurePattern,
    /// s is initially crashed iff s takes no step in the execution.
    ByStepActivity,
};

std::string_view to_string(InitialCrashInterpretation interp) noexcept;

struct PropertyStatus
{
    enum class Kind
    {
        Holds,
        ViolatedAt,
        VacuouslyHolds,
        Pending,
        DecidedAt,
    };

    Kind kind = Kind::Pending;
    TimeIndex index = 0;

    bool violated() const noexcept { return kind == Kind::ViolatedAt; }
    friend bool operator==(const PropertyStatus &, const PropertyStatus &) = default;
};

std::string to_string(const PropertyStatus &s);

struct SDDVerdict
{
    PropertyStatus integrity;   // Holds | ViolatedAt
    PropertyStatus validity;    // Holds | ViolatedAt | VacuouslyHolds | Pending
    PropertyStatus termination; // DecidedAt | Pending

    bool any_violation() const noexcept { return integrity.violated() || validity.violated(); }
    /// Histogram key, e.g. "integrity=holds validity=holds termination=decided".
    std::string category() const;
};

/// Whether s counts as initially crashed on this prefix; nullopt when the
/// step-activity reading cannot tell yet (s has not stepped and is still up).
std::optional<bool> initially_crashed(const ExecutionPrefix &prefix, InitialCrashInterpretation interp);

/// Throws MissingInput when C_0 carries no source input.
SDDVerdict check_sdd(const ExecutionPrefix &prefix, InitialCrashInterpretation interp);

PropertyMonitor integrity_monitor();
PropertyMonitor validity_monitor(InitialCrashInterpretation interp);
/// Satisfied once d has decided; never violated on a finite prefix.
PropertyMonitor termination_monitor();

// -- Unbounded decision time and mirrored schedules --------------------------

/// Member k: s sends m in its first step (index 0) and then takes trivial
/// steps through index k, d receives m at index k + 1, then s and d alternate
/// up to the member horizon. Member k is admissible in the GST model with
/// gst = k. Throws NotC1Compliant when a probe run violates (C1).
ExecutionFamily unbounded_decision_family(const AlgorithmSpec &algorithm, Bit input, std::size_t k_max,
                                          std::size_t horizon = 0);

/// The limit of that family: d never takes a step, so the system never
/// stabilizes.
ExecutionPrefix never_stabilizing_limit(const AlgorithmSpec &algorithm, Bit input, std::size_t horizon);

/// Same actors and step kinds at every index, delivering the flipped message
/// exactly where the original delivers its message.
ExecutionPrefix mirror_schedule(const ExecutionPrefix &original, Bit flipped_input, const AlgorithmSpec &algorithm);

// -- Impossibility reports ---------------------------------------------------

struct NamedTrace
{
    std::string name;
    ExecutionPrefix trace;
};

enum class ViewAlignment
{
    /// Compare d at equal configuration indices (time-aligned, needed when d
    /// reads a failure detector).
    ByIndex,
    /// Compare d's j-th own steps (d has no clock).
    ByOwnStep,
};

struct ViewEntry
{
    std::size_t left_position = 0;
    std::size_t right_position = 0;
    bool state_equal = false;
    bool observation_equal = false;
};

struct ViewCertificate
{
    std::string left;
    std::string right;
    ViewAlignment alignment = ViewAlignment::ByIndex;
    /// ByIndex: configuration indices 0..through. ByOwnStep: d-steps 0..through-1.
    std::size_t through = 0;
    std::vector<ViewEntry> entries;

    bool holds() const;
};

/// Recomputes d's view of both traces and compares it entry by entry.
ViewCertificate certify_view(const NamedTrace &left, const NamedTrace &right, ViewAlignment alignment,
                             std::size_t through);

struct ImpossibilityReport
{
    std::string harness;
    std::vector<NamedTrace> scenario_traces;
    std::vector<ViewCertificate> certificates;
    std::string violated_property;
    std::string cited_trace;
    InitialCrashInterpretation interpretation = InitialCrashInterpretation::ByFailurePattern;
    std::optional<TimeIndex> violation_index;
    std::string narrative;

    const ExecutionPrefix &trace(std::string_view name) const;
};

/// Independent re-check: the cited violation via check_sdd and every
/// certificate by recomputing d's views.
bool reverify(const ImpossibilityReport &report);

struct Theorem3Options
{
    std::size_t horizon = 12;
    /// Depth of the deciding-extension search when d never decides with s down.
    std::size_t extension_budget = 6;
};

/// Builds alpha_0 / alpha_1 (s initially crashed) and alpha_0' / alpha_1'
/// (s alive, its message withheld until d has replayed its deciding view).
/// Throws BoundedDecisionTime when the model admits no such deferral.
ImpossibilityReport theorem3_quadruple(const AlgorithmSpec &algorithm, const ModelParams &params,
                                       const Theorem3Options &options = {});

using FdHistorySource = std::function<FDHistory(const FailurePattern &, TimeIndex horizon)>;

FdHistorySource perfect_fd_source();
/// Seeded random table; a pure function of (seed, pattern).
FdHistorySource random_fd_source(std::uint64_t seed);

struct FdHarnessOptions
{
    TimeIndex crash_time = 3;
    std::size_t horizon = 10;
    /// Horizon is doubled up to this cap while d has not decided.
    std::size_t horizon_cap = 80;
};

/// Crash-by-pattern reading: s crashes at t_c without stepping; alpha' lets s
/// take one step before t_c and withholds its message until after t_d.
ImpossibilityReport fd_impossibility_pattern_interp(const AlgorithmSpec &algorithm, const FdHistorySource &source,
                                                    const FdHarnessOptions &options = {});

/// Step-activity reading: s never steps, is up before t_c, d cannot tell the
/// two inputs apart.
ImpossibilityReport fd_impossibility_step_interp(const AlgorithmSpec &algorithm, const FdHistorySource &source,
                                                 const FdHarnessOptions &options = {});

} // namespace sddsim
