#pragma once

#include <string>

#include <json.hpp>

namespace medcurate::cli {

enum class ProviderRole { score, deita, logprob, judge };

struct RemoteDefaults {
  std::string api_key_env = "MEDCURATE_API_KEY";
  std::string model;
};

/// Turns a short command-line provider spec into a registry entry:
///   mock                  the mock for the role (judges prefer longer answers)
///   mock-longer           content-keyed mock judge
///   mock-position         position-biased mock judge
///   uniform:V             uniform LM over V symbols
///   ngram:FILE[:ORDER]    character n-gram LM trained on FILE, one text per line
///   remote:URL            HTTP provider for the role
///   config:FILE           a JSON file holding the entry itself
nlohmann::json provider_entry(const std::string& spec, ProviderRole role, const RemoteDefaults& remote = {});

}  // namespace medcurate::cli
