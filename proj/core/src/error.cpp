#include "isirate/error.hpp"

namespace isirate {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NonConvergent: return "NonConvergent";
    case ErrorCode::RootFindingFailure: return "RootFindingFailure";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DegenerateSnr: return "DegenerateSnr";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::MissingMoments: return "MissingMoments";
    case ErrorCode::PartitionInvalid: return "PartitionInvalid";
    case ErrorCode::NormalizationViolated: return "NormalizationViolated";
    case ErrorCode::RootBracketFailure: return "RootBracketFailure";
    case ErrorCode::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::SnrTooLow: return "SnrTooLow";
    }
    return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonConvergent:
    case ErrorCode::RootFindingFailure:
    case ErrorCode::SingularSystem:
    case ErrorCode::NotConverged:
    case ErrorCode::DegenerateSnr:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::RootBracketFailure:
    case ErrorCode::StateBudgetExceeded:
    case ErrorCode::Inconclusive:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

} // namespace isirate
