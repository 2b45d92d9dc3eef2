#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crosscount {

// Each kind maps to a distinct process exit code in the CLI.
enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  Io,
  Parse,
  Config,
  Mismatch,
  Numeric,
  Version,
};

inline constexpr int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return 10;
    case ErrorKind::OutOfRange: return 11;
    case ErrorKind::Io: return 12;
    case ErrorKind::Parse: return 13;
    case ErrorKind::Config: return 14;
    case ErrorKind::Mismatch: return 15;
    case ErrorKind::Numeric: return 16;
    case ErrorKind::Version: return 17;
  }
  return 1;
}

inline constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Config: return "config";
    case ErrorKind::Mismatch: return "mismatch";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Version: return "version";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace crosscount
