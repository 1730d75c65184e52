#pragma once

#include <map>
#include <string>
#include <string_view>

namespace medcurate {

/// A versioned prompt template with `{name}` placeholders. Braces that do
/// not name a supplied variable are left untouched, so JSON examples inside
/// a template survive rendering.
struct PromptTemplate {
  std::string_view name;  // e.g. "single_judge_v1"
  std::string_view text;

  /// SHA-256 of the template text, recorded in reports.
  std::string hash() const;
  std::string render(const std::map<std::string, std::string>& vars) const;
};

/// Pairwise single-round judging; fills user_query, assistant1, assistant2.
const PromptTemplate& single_judge_template();
/// Per-round rubric scoring; fills history, question, solution, answer.
const PromptTemplate& multi_judge_template();
/// Four-aspect comparison for preference pairs; fills question, response1, response2.
const PromptTemplate& dpo_compare_template();
/// System prompt used when regenerating a response as a doctor.
const PromptTemplate& doctor_system_prompt();

}  // namespace medcurate
