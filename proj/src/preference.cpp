#include "medcurate/preference.hpp"

#include "medcurate/errors.hpp"
#include "medcurate/templates.hpp"
#include "medcurate/text.hpp"

namespace medcurate {

SubjectiveResult build_subjective_pair(std::string id, std::string_view prompt, std::string_view original_response,
                                       JudgeProvider& judge, const RetryPolicy& retry) {
  if (prompt.empty() || original_response.empty())
    throw ValidationError("prompt and original response must be nonempty");
  std::string regenerated;
  Verdict verdict;
  try {
    regenerated = generate(judge, prompt, doctor_system_prompt().text, retry);
    verdict = compare(judge, prompt, original_response, regenerated, retry);
  } catch (const ParseError& e) {
    return Skip{std::string("unparseable_verdict: ") + e.what()};
  } catch (const ProviderError& e) {
    return Skip{std::string("provider_error: ") + e.what()};
  }
  if (verdict == Verdict::equal) return Skip{"equal"};
  if (regenerated == original_response) return Skip{"identical_responses"};

  PreferencePair p;
  p.id = std::move(id);
  p.prompt = std::string(prompt);
  p.kind = PairKind::subjective;
  if (verdict == Verdict::first) {
    p.chosen = std::string(original_response);
    p.rejected = std::move(regenerated);
  } else {
    p.chosen = std::move(regenerated);
    p.rejected = std::string(original_response);
  }
  return p;
}

std::string render_option(std::string_view label, std::string_view option_text) {
  return std::string(label) + ". " + std::string(option_text);
}

std::string render_mcq_prompt(const MCQItem& mcq) {
  std::string out = mcq.stem;
  for (const auto& [label, option] : mcq.options) out += "\n" + render_option(label, option);
  return out;
}

PreferencePair build_objective_pair(const MCQItem& mcq, Rng& rng) {
  validate(mcq);
  std::vector<std::string> wrong;
  for (const auto& [label, option] : mcq.options)
    if (label != mcq.gold) wrong.push_back(label);
  const auto& drawn = wrong[static_cast<std::size_t>(rng.below(wrong.size()))];

  PreferencePair p;
  p.id = mcq.id;
  p.prompt = render_mcq_prompt(mcq);
  p.chosen = render_option(mcq.gold, mcq.options.at(mcq.gold));
  p.rejected = render_option(drawn, mcq.options.at(drawn));
  p.kind = PairKind::objective;
  return p;
}

std::vector<PreferencePair> build_objective_pairs(std::span<const MCQItem> items, std::uint64_t seed) {
  std::vector<PreferencePair> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    Rng rng(derive_seed(seed, item.id));
    out.push_back(build_objective_pair(item, rng));
  }
  return out;
}

PairStats pair_manifest_stats(std::span<const PreferencePair> pairs) {
  PairStats s;
  for (const auto& p : pairs) (p.kind == PairKind::subjective ? s.subjective : s.objective)++;
  s.total = s.subjective + s.objective;
  return s;
}

}  // namespace medcurate
