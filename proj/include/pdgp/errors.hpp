#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdgp {

enum class ErrorCode {
  // usage / configuration
  InvalidArgument,
  InvalidK,
  // input data
  InvalidMatrix,
  DimensionMismatch,
  LengthMismatch,
  EmptyColumn,
  EmptyRow,
  FileUnreadable,
  RaggedRows,
  NonNumericCell,
  BadHeader,
  MalformedEntry,
  IndexOutOfRange,
  UnknownId,
  DuplicateId,
  SingleClass,
  OutDirUnwritable,
  // numerical
  ZeroMatrix,
  NotConverged,
  DegenerateVector,
  WindowEmpty,
  NothingSplittable,
};

enum class ErrorCategory { Usage, Data, Numerical };

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::EmptyRow: return "EmptyRow";
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumericCell: return "NonNumericCell";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::MalformedEntry: return "MalformedEntry";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::OutDirUnwritable: return "OutDirUnwritable";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::WindowEmpty: return "WindowEmpty";
    case ErrorCode::NothingSplittable: return "NothingSplittable";
  }
  return "Unknown";
}

constexpr ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidK:
      return ErrorCategory::Usage;
    case ErrorCode::ZeroMatrix:
    case ErrorCode::NotConverged:
    case ErrorCode::DegenerateVector:
    case ErrorCode::WindowEmpty:
    case ErrorCode::NothingSplittable:
      return ErrorCategory::Numerical;
    default:
      return ErrorCategory::Data;
  }
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pdgp
