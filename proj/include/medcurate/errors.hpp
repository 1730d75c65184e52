#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace medcurate {

/// Base of every error raised by the toolkit. `kind()` is the stable,
/// machine-readable category reported by the CLI.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what, std::size_t partial_count = 0)
      : Error(what), partial_count_(partial_count) {}
  const char* kind() const noexcept override { return "io_error"; }
  /// Records written before the failure (write paths only).
  std::size_t partial_count() const noexcept { return partial_count_; }

 private:
  std::size_t partial_count_;
};

/// A record or parameter violates its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "validation_error"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config_error"; }
};

/// A judge or scorer reply that cannot be interpreted.
class ParseError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parse_error"; }
};

/// Failure inside a model-backed provider. Retryable failures (transport,
/// timeouts, 5xx) may succeed on a later attempt; the rest never will.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, bool retryable)
      : Error(what), retryable_(retryable) {}
  const char* kind() const noexcept override { return "provider_error"; }
  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

/// The direct information score of a turn is too close to zero for the
/// context relevance ratio to be meaningful.
class RedundancyDegenerate : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "redundancy_degenerate"; }
};

/// A replayed transcript has no reply for a request.
class TranscriptMiss : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "transcript_miss"; }
};

}  // namespace medcurate
