#pragma once

#include <stdexcept>
#include <string>

namespace isirate {

enum class ErrorCode {
    DomainError,
    InvalidParams,
    NonConvergent,
    RootFindingFailure,
    SingularSystem,
    NotConverged,
    DegenerateSnr,
    BudgetExceeded,
    MissingMoments,
    PartitionInvalid,
    NormalizationViolated,
    RootBracketFailure,
    StateBudgetExceeded,
    Inconclusive,
    SnrTooLow,
};

const char* to_string(ErrorCode code) noexcept;

/// Numerical failures (as opposed to bad inputs) map to a distinct CLI exit code.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace isirate
