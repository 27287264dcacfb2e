#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace critshape {

enum class ErrorKind {
  InvalidArgument,
  ParseError,
  DomainError,
  NonpositiveField,
  PointOnBoundary,
  Hp2Violated,
  OutsideImage,
  NewtonDiverged,
  MeshQualityFailure,
  SolverStagnation,
  ContinuationFailed,
  EigenSolveFailure,
  EmptyIntersection,
  CriticalPointMismatch,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception type; `kind()`
// identifies the contract-level error named in the operation docs.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// ContinuationFailed carries the last parameter value that was reached.
class ContinuationError : public Error {
 public:
  ContinuationError(double lambda_reached, const std::string& what)
      : Error(ErrorKind::ContinuationFailed, what), lambda_reached_(lambda_reached) {}

  double lambda_reached() const noexcept { return lambda_reached_; }

 private:
  double lambda_reached_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonpositiveField: return "NonpositiveField";
    case ErrorKind::PointOnBoundary: return "PointOnBoundary";
    case ErrorKind::Hp2Violated: return "Hp2Violated";
    case ErrorKind::OutsideImage: return "OutsideImage";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::MeshQualityFailure: return "MeshQualityFailure";
    case ErrorKind::SolverStagnation: return "SolverStagnation";
    case ErrorKind::ContinuationFailed: return "ContinuationFailed";
    case ErrorKind::EigenSolveFailure: return "EigenSolveFailure";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::CriticalPointMismatch: return "CriticalPointMismatch";
  }
  return "Unknown";
}

}  // namespace critshape
