#ifndef FNDEPTH_ERROR_HPP
#define FNDEPTH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace fndepth {

enum class ErrorCode {
  DuplicateGridPoint,
  InvalidValue,
  ShapeMismatch,
  GridMismatch,
  InvalidK,
  InvalidOrder,
  EmptyDataset,
  InvalidHurst,
  InvalidDomain,
  NotPositiveSemidefinite,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateGridPoint: return "DuplicateGridPoint";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InvalidHurst: return "InvalidHurst";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::NotPositiveSemidefinite: return "NotPositiveSemidefinite";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fndepth

#endif  // FNDEPTH_ERROR_HPP
