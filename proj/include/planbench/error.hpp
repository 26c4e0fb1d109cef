#pragma once

#include <stdexcept>
#include <string>

namespace planbench {

enum class ErrorKind {
  invalid_scene,
  unknown_object,
  precondition_violated,
  mismatched_objects,
  unknown_task,
  generation_failed,
  cache_miss,
  transport_error,
  rate_limited,
  script_exhausted,
  not_a_failure,
  schema_mismatch,
  config_error,
  invariant_violation,
};

const char* to_string(ErrorKind kind);

/// Base exception for every error this library raises; `kind()` lets callers
/// branch without a class per error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the live backend on HTTP 429; carries the server's retry hint.
class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& message, double retry_after_seconds)
      : Error(ErrorKind::rate_limited, message), retry_after_(retry_after_seconds) {}

  double retry_after_seconds() const noexcept { return retry_after_; }

 private:
  double retry_after_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_scene: return "InvalidScene";
    case ErrorKind::unknown_object: return "UnknownObject";
    case ErrorKind::precondition_violated: return "PreconditionViolated";
    case ErrorKind::mismatched_objects: return "MismatchedObjects";
    case ErrorKind::unknown_task: return "UnknownTask";
    case ErrorKind::generation_failed: return "GenerationFailed";
    case ErrorKind::cache_miss: return "CacheMiss";
    case ErrorKind::transport_error: return "TransportError";
    case ErrorKind::rate_limited: return "RateLimited";
    case ErrorKind::script_exhausted: return "ScriptExhausted";
    case ErrorKind::not_a_failure: return "NotAFailure";
    case ErrorKind::schema_mismatch: return "SchemaMismatch";
    case ErrorKind::config_error: return "ConfigError";
    case ErrorKind::invariant_violation: return "InvariantViolation";
  }
  return "Error";
}

}  // namespace planbench
