#include "medcurate/http.hpp"

#include <cstdlib>

#include <httplib.h>

#include "medcurate/errors.hpp"

namespace medcurate {

RemoteConfig RemoteConfig::from_json(const nlohmann::json& j) {
  RemoteConfig c;
  c.base_url = j.at("base_url").get<std::string>();
  c.path = j.value("path", std::string{});
  c.api_key_env = j.value("api_key_env", std::string{});
  c.model = j.value("model", std::string{});
  c.timeout = std::chrono::milliseconds(j.value("timeout_ms", 60000));
  c.max_in_flight = j.value("max_in_flight", std::size_t{8});
  return c;
}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return available_ > 0; });
  --available_;
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mu_);
    ++available_;
  }
  cv_.notify_one();
}

nlohmann::json post_json(const RemoteConfig& cfg, const nlohmann::json& body) {
  httplib::Client client(cfg.base_url);
  if (!client.is_valid()) throw ProviderError("invalid base URL " + cfg.base_url, false);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers;
  if (!cfg.api_key_env.empty()) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw ProviderError("environment variable " + cfg.api_key_env + " is not set", false);
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  auto res = client.Post(cfg.path.empty() ? "/" : cfg.path, headers, body.dump(), "application/json");
  if (!res) throw ProviderError("request to " + cfg.base_url + cfg.path + " failed: " + httplib::to_string(res.error()), true);
  if (res->status == 429 || res->status >= 500)
    throw ProviderError("HTTP " + std::to_string(res->status) + " from " + cfg.base_url, true);
  if (res->status < 200 || res->status >= 300)
    throw ProviderError("HTTP " + std::to_string(res->status) + " from " + cfg.base_url + ": " + res->body, false);
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("unparseable reply: ") + e.what(), false);
  }
}

}  // namespace medcurate
