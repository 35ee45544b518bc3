#include "fwbb/errors.hpp"

namespace fwbb {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SplitInfeasible: return "SplitInfeasible";
    case ErrorKind::NodeInfeasible: return "NodeInfeasible";
    case ErrorKind::OracleFailure: return "OracleFailure";
    case ErrorKind::BudgetInfeasible: return "BudgetInfeasible";
    case ErrorKind::AssignmentInfeasible: return "AssignmentInfeasible";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::InvalidSense: return "InvalidSense";
    case ErrorKind::UnreachableDemand: return "UnreachableDemand";
    case ErrorKind::NonDescentDirection: return "NonDescentDirection";
    case ErrorKind::DomainFailure: return "DomainFailure";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::WarmStartFailure: return "WarmStartFailure";
    case ErrorKind::NoFractionalVariable: return "NoFractionalVariable";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ContractViolation: return "ContractViolation";
  }
  return "Unknown";
}

SolverError::SolverError(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace fwbb
