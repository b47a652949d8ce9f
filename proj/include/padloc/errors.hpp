#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace padloc {

enum class ErrorCode {
  InvalidArgument,
  NotAUnit,
  Divergent,
  InsufficientPrecision,
  ConductorMismatch,
  LevelTooLow,
  NearPole,
  Pole,
  SingularArgument,
  RegimeMismatch,
  TableTooLarge,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can report it in its failure ledger.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotAUnit: return "NotAUnit";
    case ErrorCode::Divergent: return "Divergent";
    case ErrorCode::InsufficientPrecision: return "InsufficientPrecision";
    case ErrorCode::ConductorMismatch: return "ConductorMismatch";
    case ErrorCode::LevelTooLow: return "LevelTooLow";
    case ErrorCode::NearPole: return "NearPole";
    case ErrorCode::Pole: return "Pole";
    case ErrorCode::SingularArgument: return "SingularArgument";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::TableTooLarge: return "TableTooLarge";
  }
  return "Unknown";
}

}  // namespace padloc
