#include "robustbo/errors.hpp"

namespace robustbo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::ConfigError: return "config-error";
    case ErrorCode::DataError: return "data-error";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::MeasureHasNoQ: return "measure-has-no-q";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error Error::with_context(std::string_view context) const {
  std::string msg = what();
  // strip our own "<code>: " prefix so it is not repeated
  const auto prefix = std::string(to_string(code_)) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return Error(code_, std::string(context) + ": " + msg);
}

void throw_invalid(const std::string& message) { throw Error(ErrorCode::InvalidArgument, message); }

void throw_numerical(const std::string& message) { throw Error(ErrorCode::NumericalFailure, message); }

namespace {
std::string join_violations(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += "; ";
    out += v[i];
  }
  return out;
}
}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorCode::ConfigError, join_violations(violations)), violations_(std::move(violations)) {}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return 2;
    case ErrorCode::DataError:
    case ErrorCode::ParseError:
    case ErrorCode::IoError: return 3;
    case ErrorCode::NumericalFailure: return 4;
    default: return 1;
  }
}

}  // namespace robustbo
