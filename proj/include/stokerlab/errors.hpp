#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stokerlab {

enum class ErrorKind {
  BallBoundary,
  DegenerateFace,
  AmbiguousOrientation,
  DegenerateAxis,
  LiftFailure,
  InvalidCombinatorics,
  PlanarityViolation,
  ConvexityViolation,
  DimensionMismatch,
  RankDeficiency,
  DegenerateFrame,
  InvalidTarget,
  NoConvergence,
  ConvexityLost,
  BallExit,
  IndexRange,
  InvalidRepresentation,
  NotUnitary,
  EigenFailure,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BallBoundary: return "BallBoundary";
    case ErrorKind::DegenerateFace: return "DegenerateFace";
    case ErrorKind::AmbiguousOrientation: return "AmbiguousOrientation";
    case ErrorKind::DegenerateAxis: return "DegenerateAxis";
    case ErrorKind::LiftFailure: return "LiftFailure";
    case ErrorKind::InvalidCombinatorics: return "InvalidCombinatorics";
    case ErrorKind::PlanarityViolation: return "PlanarityViolation";
    case ErrorKind::ConvexityViolation: return "ConvexityViolation";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::RankDeficiency: return "RankDeficiency";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::InvalidTarget: return "InvalidTarget";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ConvexityLost: return "ConvexityLost";
    case ErrorKind::BallExit: return "BallExit";
    case ErrorKind::IndexRange: return "IndexRange";
    case ErrorKind::InvalidRepresentation: return "InvalidRepresentation";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace stokerlab
