#pragma once

#include <chrono>
#include <thread>

#include "medcurate/errors.hpp"

namespace medcurate {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{0};
};

/// Calls fn until it succeeds, a non-retryable ProviderError is thrown, or
/// the attempts run out; the last error propagates.
template <class Fn>
auto with_retries(const RetryPolicy& policy, Fn&& fn) -> decltype(fn()) {
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const ProviderError& e) {
      if (!e.retryable() || attempt >= policy.max_attempts) throw;
    }
    if (policy.backoff.count() > 0) std::this_thread::sleep_for(policy.backoff * attempt);
  }
}

}  // namespace medcurate
