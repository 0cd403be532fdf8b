#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctcbert {

enum class ErrorKind {
  Infeasible,
  TooLarge,
  DimensionMismatch,
  LengthMismatch,
  ShapeMismatch,
  ConfigInvalid,
  NonFiniteLoss,
  EmptyDataset,
  DivisionByZero,
  Io,
  VersionMismatch,
};

std::string_view to_string(ErrorKind kind);

// Every library failure is reported through this type; the CLI maps the kind
// onto the category printed in its error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace ctcbert
