#pragma once

#include <stdexcept>
#include <string>

namespace dlorenz {

enum class ErrorKind {
  ZeroB,
  Escape,
  Overflow,
  EmptyStrip,
  OutOfStrip,
  DegenerateD,
  DegenerateCoefficients,
  ConditionA,
  InvalidCase,
  FloatRange,
  InsufficientRange,
  SmallM3,
  Config,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace dlorenz
