#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qhdyn {

enum class ErrorKind {
  InvalidArgument,
  NotHermitian,
  NoConvergence,
  NotPositiveDefinite,
  Singular,
  NonFinite,
  FrameNotHermitian,
  ZeroInitialNorm,
  ParseError,
  ValidationError,
  NotFound,
  UnknownParameter,
  Io,
};

inline std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::FrameNotHermitian: return "FrameNotHermitian";
    case ErrorKind::ZeroInitialNorm: return "ZeroInitialNorm";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::UnknownParameter: return "UnknownParameter";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qhdyn
