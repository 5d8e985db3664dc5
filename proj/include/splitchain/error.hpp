#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splitchain {

enum class ErrorKind {
  Config,
  Shape,
  NumericInput,
  Label,
  EmptyInput,
  Ingestion,
  Integrity,
  Schema,
  InsufficientData,
  NotFound,
  Authorization,
  Authentication,
  Parse,
  Key,
  Join,
  Io,
  State,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace splitchain
