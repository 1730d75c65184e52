#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>

#include <json.hpp>

namespace medcurate {

/// Connection settings shared by every remote provider.
struct RemoteConfig {
  /// scheme://host[:port], e.g. "https://api.example.com".
  std::string base_url;
  /// Request path appended to base_url.
  std::string path;
  /// Environment variable holding the bearer token; empty for none.
  std::string api_key_env;
  std::string model;
  std::chrono::milliseconds timeout{60000};
  std::size_t max_in_flight = 8;

  static RemoteConfig from_json(const nlohmann::json& j);
};

/// Counting semaphore bounding concurrent requests.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::size_t limit) : available_(limit == 0 ? 1 : limit) {}
  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t available_;
};

class InFlightPermit {
 public:
  explicit InFlightPermit(InFlightLimiter& l) : l_(l) { l_.acquire(); }
  ~InFlightPermit() { l_.release(); }
  InFlightPermit(const InFlightPermit&) = delete;
  InFlightPermit& operator=(const InFlightPermit&) = delete;

 private:
  InFlightLimiter& l_;
};

/// POSTs a JSON body and returns the parsed JSON reply. Transport errors,
/// timeouts, 429 and 5xx raise retryable ProviderErrors; other non-2xx
/// statuses and unparseable bodies raise non-retryable ones.
nlohmann::json post_json(const RemoteConfig& cfg, const nlohmann::json& body);

}  // namespace medcurate
