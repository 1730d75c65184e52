#include "provider_specs.hpp"

#include <fstream>

#include "medcurate/errors.hpp"

namespace medcurate::cli {

using nlohmann::json;

namespace {

std::string role_name(ProviderRole role) {
  switch (role) {
    case ProviderRole::score: return "score";
    case ProviderRole::deita: return "deita";
    case ProviderRole::logprob: return "logprob";
    case ProviderRole::judge: return "judge";
  }
  return "?";
}

std::size_t parse_count(const std::string& s, const std::string& spec) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || v == 0) throw ConfigError("bad number \"" + s + "\" in provider spec " + spec);
  return static_cast<std::size_t>(v);
}

}  // namespace

json provider_entry(const std::string& spec, ProviderRole role, const RemoteDefaults& remote) {
  auto mismatch = [&] {
    return ConfigError("provider spec \"" + spec + "\" cannot act as a " + role_name(role) + " provider");
  };

  if (spec.starts_with("config:")) {
    std::ifstream in(spec.substr(7));
    if (!in) throw IoError("cannot open " + spec.substr(7));
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(spec + ": " + e.what());
    }
  }
  if (spec == "mock") {
    switch (role) {
      case ProviderRole::score: return {{"kind", "mock-score"}};
      case ProviderRole::deita: return {{"kind", "mock-deita"}};
      case ProviderRole::judge: return {{"kind", "mock-judge"}, {"style", "prefer_longer"}};
      case ProviderRole::logprob: throw mismatch();
    }
  }
  if (spec == "mock-longer" || spec == "mock-position") {
    if (role != ProviderRole::judge) throw mismatch();
    return {{"kind", "mock-judge"}, {"style", spec == "mock-longer" ? "prefer_longer" : "position_biased"}};
  }
  if (spec.starts_with("uniform:")) {
    if (role != ProviderRole::logprob) throw mismatch();
    return {{"kind", "uniform-lm"}, {"vocab_size", parse_count(spec.substr(8), spec)}};
  }
  if (spec.starts_with("ngram:")) {
    if (role != ProviderRole::logprob) throw mismatch();
    std::string rest = spec.substr(6);
    json j = {{"kind", "ngram-lm"}, {"order", 2}};
    if (auto colon = rest.rfind(':'); colon != std::string::npos &&
                                      rest.find_first_not_of("0123456789", colon + 1) == std::string::npos &&
                                      colon + 1 < rest.size()) {
      j["order"] = parse_count(rest.substr(colon + 1), spec);
      rest.resize(colon);
    }
    if (rest.empty()) throw ConfigError("provider spec \"" + spec + "\" names no training file");
    j["train_file"] = rest;
    return j;
  }
  if (spec.starts_with("remote:")) {
    json j = {{"base_url", spec.substr(7)}, {"api_key_env", remote.api_key_env}};
    if (!remote.model.empty()) j["model"] = remote.model;
    switch (role) {
      case ProviderRole::score:
      case ProviderRole::deita: j["kind"] = "remote-score"; break;
      case ProviderRole::logprob: j["kind"] = "remote-logprob"; break;
      case ProviderRole::judge: j["kind"] = "remote-judge"; break;
    }
    return j;
  }
  throw ConfigError("unrecognized provider spec \"" + spec + "\"");
}

}  // namespace medcurate::cli
