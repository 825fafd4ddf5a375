#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ablab {

enum class ErrorCode {
  InvalidArgument,
  SingularPoint,
  StepTooCoarse,
  PointOnPath,
  SegmentThroughFlux,
  NotGridMultiple,
  ProbeStraddlesAxis,
  OnAxis,
  PacketTooNarrow,
  PacketOffGrid,
  FluxOnLink,
  SolverDiverged,
  GeometryOverlap,
  FluxOutsideChamber,
  GridTouchesAxis,
  NotAField,
  SchemaError,
  RangeError,
  IoError,
  FitDegenerate,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can emit a machine-readable error document.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::StepTooCoarse: return "StepTooCoarse";
    case ErrorCode::PointOnPath: return "PointOnPath";
    case ErrorCode::SegmentThroughFlux: return "SegmentThroughFlux";
    case ErrorCode::NotGridMultiple: return "NotGridMultiple";
    case ErrorCode::ProbeStraddlesAxis: return "ProbeStraddlesAxis";
    case ErrorCode::OnAxis: return "OnAxis";
    case ErrorCode::PacketTooNarrow: return "PacketTooNarrow";
    case ErrorCode::PacketOffGrid: return "PacketOffGrid";
    case ErrorCode::FluxOnLink: return "FluxOnLink";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::GeometryOverlap: return "GeometryOverlap";
    case ErrorCode::FluxOutsideChamber: return "FluxOutsideChamber";
    case ErrorCode::GridTouchesAxis: return "GridTouchesAxis";
    case ErrorCode::NotAField: return "NotAField";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
  }
  return "Unknown";
}

}  // namespace ablab
