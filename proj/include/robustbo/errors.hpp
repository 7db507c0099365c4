#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace robustbo {

enum class ErrorCode {
  InvalidArgument,
  NumericalFailure,
  ConfigError,
  DataError,
  ParseError,
  MeasureHasNoQ,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Library exception. The code survives re-throwing with added context.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

  /// Copy of this error with `context` prefixed to the message.
  Error with_context(std::string_view context) const;

 private:
  ErrorCode code_;
};

[[noreturn]] void throw_invalid(const std::string& message);
[[noreturn]] void throw_numerical(const std::string& message);

/// Config validation failure carrying every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Process exit status for an error, as documented for the CLI.
int exit_code_for(ErrorCode code);

}  // namespace robustbo
