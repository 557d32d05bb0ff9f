#pragma once

#include <stdexcept>
#include <string>

namespace star {

enum class ErrorKind {
  InvalidSize,
  InvalidParams,
  Parse,
  Validation,
  Collision,
  Causality,
  DuplicateIndex,
  MissingIndex,
  UnknownDatum,
  Infeasible,
  TooLarge,
  Internal,
  Io,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace star
