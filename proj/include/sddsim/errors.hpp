#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sddsim
{

enum class ErrorCode
{
    DeliveryNotInBuffer,
    ActorCrashed,
    AlgorithmContract,
    FdMismatch,
    ParamMismatch,
    DomainMismatch,
    EmptyPrefix,
    NonPositiveEpsilon,
    NotConverging,
    NotC1Compliant,
    KindMismatchUnconstructible,
    BoundedDecisionTime,
    NoDecisionWithinHorizon,
    NoIndistinguishableSlot,
    MissingInput,
    BudgetExceeded,
    Config,
    Trace,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` says what went wrong and
/// `index()` carries the execution index when the failure is tied to one.
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &what, std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), m_code(code), m_index(index)
    {
    }

    ErrorCode code() const noexcept { return m_code; }
    std::optional<std::size_t> index() const noexcept { return m_index; }

private:
    ErrorCode m_code;
    std::optional<std::size_t> m_index;
};

} // namespace sddsim
