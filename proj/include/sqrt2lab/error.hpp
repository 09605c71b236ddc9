#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sqrt2lab {

enum class ErrorKind {
  NonRepresentable,
  InvalidArgument,
  ZeroValue,
  ZeroTerm,
  ClassificationMismatch,
  CapExceeded,
  PatternBreak,
  OutOfRange,
  SingularSystem,
  DegenerateParams,
  OutsideSeparatrix,
  InvalidProfile,
  NonConvergent,
  Blowup,
};

std::string_view error_name(ErrorKind kind) noexcept;

/// Domain error raised by every module. The CLI maps it to exit status 1
/// and prints `error_name(kind())` followed by the message.
class DomainError : public std::runtime_error {
public:
  DomainError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace sqrt2lab
