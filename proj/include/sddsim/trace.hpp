#pragma once

// Line-delimited JSON traces: one header line, then one line per step. The
// state digest of every configuration makes replay comparison byte-exact.

#include "sddsim/kernel.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sddsim
{

using Json = nlohmann::ordered_json;

std::string hex_digest(std::uint64_t value);
std::optional<std::uint64_t> parse_hex_digest(const std::string &text);

Json inputs_to_json(const Inputs &inputs);
Json pattern_to_json(const FailurePattern &pattern);

struct TraceFile
{
    Json header;
    std::vector<Json> steps;
    /// Digest of C_0 followed by the digest after every step.
    std::vector<std::uint64_t> digests;
    std::optional<std::uint64_t> provenance;

    std::string algorithm() const;
    Inputs inputs() const;
    FailurePattern crash() const;
    /// The recorded schedule, fd values included.
    std::vector<StepDirective> schedule() const;
};

Json trace_header(const ExecutionPrefix &prefix, const Json &algorithm_options = Json::object());
Json trace_step(const ExecutionPrefix &prefix, std::size_t index);

void write_trace(std::ostream &out, const ExecutionPrefix &prefix, const Json &algorithm_options = Json::object());
std::string trace_to_string(const ExecutionPrefix &prefix, const Json &algorithm_options = Json::object());

/// Throws Error(Trace) naming the offending line.
TraceFile read_trace(std::istream &in);
TraceFile read_trace_file(const std::string &path);

/// Re-runs the recorded schedule with the given algorithm and checks every
/// digest. Throws Error(Trace) at the first mismatch.
ExecutionPrefix replay(const TraceFile &trace, const AlgorithmSpec &algorithm);

} // namespace sddsim
