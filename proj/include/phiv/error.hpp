#pragma once

#include <stdexcept>
#include <string>

namespace phiv {

enum class ErrorCode {
    InvalidArgument,
    NonCoprimeModuli,
    EmptyInput,
    ResourceLimit,
    CorruptCache,
    VersionMismatch,
    WindowTooLarge,
    ModulusTooLarge,
    MismatchedInputs,
    PreconditionViolated,
    BudgetExhausted,
    InfeasibleResiduePlan,
    FixedDivisorFound,
    ArithmeticMismatch,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace phiv
