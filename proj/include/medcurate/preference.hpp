#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "medcurate/judge.hpp"
#include "medcurate/random.hpp"
#include "medcurate/records.hpp"

namespace medcurate {

/// No pair was produced for this prompt.
struct Skip {
  std::string reason;
};

using SubjectiveResult = std::variant<PreferencePair, Skip>;

/// Regenerates a response with the doctor system prompt, asks the judge to
/// compare original (slot 1) against regenerated (slot 2) and orders the
/// pair by the verdict. "equal", unparseable verdicts and provider failures
/// yield Skip; no preference is ever invented.
SubjectiveResult build_subjective_pair(std::string id, std::string_view prompt, std::string_view original_response,
                                       JudgeProvider& judge, const RetryPolicy& retry = {});

/// "<label>. <option text>"
std::string render_option(std::string_view label, std::string_view option_text);
/// Stem followed by every rendered option, one per line.
std::string render_mcq_prompt(const MCQItem& mcq);

/// chosen = gold option, rejected = an option drawn uniformly from the
/// wrong ones. Throws ValidationError for an invalid item.
PreferencePair build_objective_pair(const MCQItem& mcq, Rng& rng);

/// Item i uses Rng(derive_seed(seed, item.id)), so each pair depends only on
/// (item, seed).
std::vector<PreferencePair> build_objective_pairs(std::span<const MCQItem> items, std::uint64_t seed);

struct PairStats {
  std::size_t subjective = 0;
  std::size_t objective = 0;
  std::size_t total = 0;
};

PairStats pair_manifest_stats(std::span<const PreferencePair> pairs);

}  // namespace medcurate
