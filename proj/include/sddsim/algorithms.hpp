#pragma once

// Algorithms under test. All of them encode the source's bit as a one-byte
// payload. Only `sync_sdd_solver` is correct, and only in the synchronous model.

#include "sddsim/kernel.hpp"
#include "sddsim/models.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sddsim
{

/// s sends its input bit in its first step; d decides the received bit, or 0
/// once it has taken delta + phi + 1 steps without a message (by then the
/// tick is at least delta + phi, the latest delivery of a message from an s
/// that was alive long enough to be forced to step).
AlgorithmSpec sync_sdd_solver(const ModelParams &params = ModelParams::synchronous());

/// d decides the received bit, or 0 after `timeout_steps` own steps without a
/// message.
AlgorithmSpec timeout_decider(unsigned timeout_steps = 3);

/// d decides the received bit, or 0 as soon as the failure detector suspects s.
AlgorithmSpec fd_suspicion_decider();

/// d decides only upon receiving s's message.
AlgorithmSpec wait_for_source();

/// s sends its input in every step; d decides on the first message and keeps
/// counting the messages it receives.
AlgorithmSpec chatty_algorithm();

/// d decides in its first step and again in its second.
AlgorithmSpec double_decider();

/// s takes a local step before sending.
AlgorithmSpec late_sender();

/// d keeps updating its memory after deciding.
AlgorithmSpec post_decision_updater();

struct AlgorithmOptions
{
    unsigned timeout_steps = 3;
    ModelParams model = ModelParams::synchronous();
};

/// Registry lookup by name: "sync-solver", "timeout-decider",
/// "fd-suspicion-decider", "wait-for-source", "chatty", "double-decider",
/// "late-sender", "post-decision-updater". A "c1:" prefix applies c1_transform.
std::optional<AlgorithmSpec> make_algorithm(std::string_view name, const AlgorithmOptions &options = {});
std::vector<std::string> algorithm_names();

} // namespace sddsim
