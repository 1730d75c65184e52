#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace medcurate {

enum class Stage { stage1, stage2 };

struct SourceBudget {
  std::string name;
  std::uint64_t available_tokens = 0;
  double target_fraction = 0.0;
};

struct Allocation {
  std::string source;
  std::uint64_t tokens = 0;
  double target_fraction = 0.0;
  std::uint64_t available_tokens = 0;
  /// tokens / available_tokens; above 1 means the source is upsampled.
  double epochs = 0.0;
};

struct MixPlan {
  Stage stage = Stage::stage1;
  std::uint64_t total_tokens = 0;
  std::vector<Allocation> allocations;  // in input order
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

inline constexpr double kFractionTolerance = 1e-9;

/// Splits total_tokens across sources by target fraction with
/// largest-remainder rounding (ties broken by source name), so allocations
/// are integers summing exactly to total_tokens.
/// Throws ValidationError if fractions are outside [0,1], do not sum to
/// 1 within 1e-9, names repeat, or a source with a nonzero fraction has no
/// available tokens.
MixPlan plan_mix(Stage stage, std::uint64_t total_tokens, std::span<const SourceBudget> sources);

/// Parses "name:available:fraction".
SourceBudget parse_source_budget(const std::string& spec);

}  // namespace medcurate
