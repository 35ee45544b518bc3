#pragma once

#include <stdexcept>
#include <string>

namespace fwbb {

enum class ErrorKind {
  InvalidArgument,
  SplitInfeasible,
  NodeInfeasible,
  OracleFailure,
  BudgetInfeasible,
  AssignmentInfeasible,
  DimensionTooLarge,
  InvalidSense,
  UnreachableDemand,
  NonDescentDirection,
  DomainFailure,
  DomainViolation,
  WarmStartFailure,
  NoFractionalVariable,
  SchemaError,
  ContractViolation,
};

const char* to_string(ErrorKind kind);

/// Every error raised by the library carries a machine-checkable kind.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fwbb
