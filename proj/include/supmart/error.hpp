#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace supmart {

/// Numerical tolerances shared by every module.
namespace tol {
inline constexpr double mass = 1e-12;     // |sum p - 1| for a probability vector
inline constexpr double eq = 1e-9;        // conditional-expectation equalities
inline constexpr double lp = 1e-9;        // LP feasibility
inline constexpr double residual = 1e-9;  // least-squares representation residual
}  // namespace tol

enum class ErrorKind {
  // structural / validation
  NotRefining,
  NotPartition,
  EmptyCell,
  IndexOutOfRange,
  ShapeMismatch,
  NotAdapted,
  NotPredictable,
  InvalidMeasure,
  EmptyMartingalePolytope,
  NotUnitClaim,
  NotNonincreasing,
  InvalidArgument,
  InvalidDecomposition,
  ZeroInitialValue,
  Parse,
  // mathematical
  MeasureDependent,
  NotSupermartingale,
  NotMartingale,
  Infeasible,
  IncompletenessDetected,
  InfeasiblePricing,
  NoRepresentation,
  UnboundedObjective,
  // environment
  Io,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotRefining: return "NotRefining";
    case ErrorKind::NotPartition: return "NotPartition";
    case ErrorKind::EmptyCell: return "EmptyCell";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotAdapted: return "NotAdapted";
    case ErrorKind::NotPredictable: return "NotPredictable";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::EmptyMartingalePolytope: return "EmptyMartingalePolytope";
    case ErrorKind::NotUnitClaim: return "NotUnitClaim";
    case ErrorKind::NotNonincreasing: return "NotNonincreasing";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidDecomposition: return "InvalidDecomposition";
    case ErrorKind::ZeroInitialValue: return "ZeroInitialValue";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::MeasureDependent: return "MeasureDependent";
    case ErrorKind::NotSupermartingale: return "NotSupermartingale";
    case ErrorKind::NotMartingale: return "NotMartingale";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::IncompletenessDetected: return "IncompletenessDetected";
    case ErrorKind::InfeasiblePricing: return "InfeasiblePricing";
    case ErrorKind::NoRepresentation: return "NoRepresentation";
    case ErrorKind::UnboundedObjective: return "UnboundedObjective";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Process exit code associated with an error: 2 validation, 3 mathematical
/// infeasibility, 4 I/O.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MeasureDependent:
    case ErrorKind::NotSupermartingale:
    case ErrorKind::NotMartingale:
    case ErrorKind::Infeasible:
    case ErrorKind::IncompletenessDetected:
    case ErrorKind::InfeasiblePricing:
    case ErrorKind::NoRepresentation:
    case ErrorKind::UnboundedObjective:
      return 3;
    case ErrorKind::Io:
      return 4;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace supmart
