#pragma once

#include <stdexcept>
#include <string>

namespace wavecrest {

enum class ErrorKind {
  InvalidInput,
  UndefinedPhaseVelocity,
  Superluminal,
  OutOfRange,
  WrongModel,
  DegenerateIncidence,
  UnreachablePath,
  NoTransit,
  InvalidIndex,
  Validation,
  Explosion,
  Parse,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wavecrest
