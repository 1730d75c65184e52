#include "medcurate/sft.hpp"

#include <cmath>
#include <numeric>

#include "medcurate/concurrency.hpp"
#include "medcurate/errors.hpp"

namespace medcurate {
namespace {

void require_assistant_turn(const Dialogue& d, std::size_t turn_index) {
  if (turn_index >= d.turns().size())
    throw ValidationError("dialogue " + d.id() + " has no turn " + std::to_string(turn_index));
  if (d.turns()[turn_index].role != Role::assistant)
    throw ValidationError("dialogue " + d.id() + ": turn " + std::to_string(turn_index) + " is not an assistant turn");
}

std::optional<double> find(const ScoreMap& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

std::optional<double> combined_for(const ScoreMap& m, const std::string& deita, const std::string& c,
                                   const std::string& q) {
  if (auto s = find(m, deita)) return *s;
  auto cv = find(m, c);
  auto qv = find(m, q);
  if (cv && qv) return combine_scores(*cv, *qv);
  return std::nullopt;
}

}  // namespace

DeitaScores DeitaScores::make(double complexity, double quality) {
  return {complexity, quality, combine_scores(complexity, quality)};
}

double combine_scores(double complexity, double quality) {
  if (!(complexity >= 0.0) || !(quality >= 0.0) || !std::isfinite(complexity) || !std::isfinite(quality))
    throw ValidationError("complexity and quality must be finite and non-negative");
  return complexity * quality;
}

double dialogue_deita_score(std::span<const double> per_turn) {
  if (per_turn.empty()) throw ValidationError("no per-turn scores to average");
  return std::accumulate(per_turn.begin(), per_turn.end(), 0.0) / static_cast<double>(per_turn.size());
}

std::string exchange_key(std::string_view base, std::size_t exchange) {
  return std::string(base) + "." + std::to_string(exchange);
}

Dialogue annotate_deita(Dialogue dialogue, DeitaScorer& scorer, const RetryPolicy& retry) {
  const auto& turns = dialogue.turns();
  for (std::size_t k = 0; k < dialogue.exchanges(); ++k) {
    const auto& instruction = turns[2 * k].text;
    const auto& response = turns[2 * k + 1].text;
    const double c = with_retries(retry, [&] { return scorer.complexity(instruction); });
    const double q = with_retries(retry, [&] { return scorer.quality(instruction, response); });
    const auto s = DeitaScores::make(c, q);
    auto& scores = dialogue.scores();
    scores[exchange_key(kComplexityKey, k)] = s.complexity;
    scores[exchange_key(kQualityKey, k)] = s.quality;
    scores[exchange_key(kDeitaKey, k)] = s.combined;
    if (dialogue.exchanges() == 1) {
      scores[std::string(kComplexityKey)] = s.complexity;
      scores[std::string(kQualityKey)] = s.quality;
      scores[std::string(kDeitaKey)] = s.combined;
    }
  }
  return dialogue;
}

std::optional<std::vector<double>> exchange_deita_scores(const Dialogue& dialogue) {
  const auto& m = dialogue.scores();
  std::vector<double> out;
  for (std::size_t k = 0; k < dialogue.exchanges(); ++k) {
    auto s = combined_for(m, exchange_key(kDeitaKey, k), exchange_key(kComplexityKey, k),
                          exchange_key(kQualityKey, k));
    if (!s && dialogue.exchanges() == 1)
      s = combined_for(m, std::string(kDeitaKey), std::string(kComplexityKey), std::string(kQualityKey));
    if (!s) return std::nullopt;
    out.push_back(*s);
  }
  return out;
}

Partition<Dialogue> select_single_turn(std::vector<Dialogue> records, double threshold) {
  Partition<Dialogue> out;
  for (auto& d : records) {
    std::optional<double> combined;
    try {
      if (auto per = exchange_deita_scores(d); per && per->size() == 1) combined = per->front();
    } catch (const ValidationError&) {
    }
    if (!combined) {
      out.quarantined.push_back({std::move(d), "missing_scores"});
      continue;
    }
    d.scores()[std::string(kDeitaKey)] = *combined;
    if (*combined >= threshold)
      out.kept.push_back(std::move(d));
    else
      out.rejected.push_back({std::move(d), "deita_below_threshold"});
  }
  return out;
}

std::string_view assistant_prefix(Lang lang) { return lang == Lang::zh ? "医生：" : "Doctor: "; }

std::string render_turn(Lang lang, const Turn& turn) {
  const std::string_view prefix =
      turn.role == Role::user ? (lang == Lang::zh ? "用户：" : "User: ") : assistant_prefix(lang);
  return std::string(prefix) + turn.text + "\n";
}

std::string scoring_context(const Dialogue& dialogue, std::size_t turn_index, bool with_history) {
  require_assistant_turn(dialogue, turn_index);
  const auto& turns = dialogue.turns();
  std::string ctx;
  if (with_history)
    for (std::size_t i = 0; i + 1 < turn_index; ++i) ctx += render_turn(dialogue.lang(), turns[i]);
  ctx += render_turn(dialogue.lang(), turns[turn_index - 1]);
  ctx += assistant_prefix(dialogue.lang());
  return ctx;
}

double conditioned_information_score(LogProbProvider& provider, const Dialogue& dialogue, std::size_t turn_index) {
  const auto ctx = scoring_context(dialogue, turn_index, true);
  return mean_nll(provider, ctx, dialogue.turns()[turn_index].text);
}

double direct_information_score(LogProbProvider& provider, const Dialogue& dialogue, std::size_t turn_index) {
  const auto ctx = scoring_context(dialogue, turn_index, false);
  return mean_nll(provider, ctx, dialogue.turns()[turn_index].text);
}

CRResult context_relevance(LogProbProvider& provider, const Dialogue& dialogue, std::size_t turn_index,
                           double epsilon) {
  CRResult r;
  r.direct = direct_information_score(provider, dialogue, turn_index);
  if (r.direct <= epsilon)
    throw RedundancyDegenerate("dialogue " + dialogue.id() + ": turn " + std::to_string(turn_index) +
                               " is trivially predictable (direct score " + std::to_string(r.direct) + ")");
  r.conditioned = conditioned_information_score(provider, dialogue, turn_index);
  r.ratio = r.conditioned / r.direct;
  return r;
}

namespace {

enum class Fate { kept, rejected, quarantined };

struct MultiTurnOutcome {
  Dialogue dialogue;
  Fate fate;
  std::string reason;
};

MultiTurnOutcome judge_dialogue(Dialogue d, LogProbProvider& provider, const MultiTurnOptions& o) {
  std::optional<std::vector<double>> per;
  try {
    per = exchange_deita_scores(d);
  } catch (const ValidationError&) {
  }
  if (!per) return {std::move(d), Fate::quarantined, "missing_scores"};
  const double deita = dialogue_deita_score(*per);
  d.scores()[std::string(kDeitaKey)] = deita;
  if (deita < o.deita_threshold) return {std::move(d), Fate::rejected, "deita_below_threshold"};

  std::string failure;
  for (std::size_t t = 3; t < d.turns().size(); t += 2) {
    CRResult cr;
    try {
      cr = with_retries(o.retry, [&] { return context_relevance(provider, d, t, o.epsilon); });
    } catch (const RedundancyDegenerate&) {
      return {std::move(d), Fate::rejected, "cr_degenerate:turn " + std::to_string(t)};
    } catch (const ProviderError& e) {
      return {std::move(d), Fate::quarantined, std::string(kQuarantined) + ": " + e.what()};
    }
    d.scores()["cr." + std::to_string(t)] = cr.ratio;
    if (failure.empty()) {
      if (cr.ratio < o.cr_low)
        failure = "cr_low:turn " + std::to_string(t);
      else if (cr.ratio > o.cr_high)
        failure = "cr_high:turn " + std::to_string(t);
    }
  }
  if (!failure.empty()) return {std::move(d), Fate::rejected, failure};
  return {std::move(d), Fate::kept, {}};
}

}  // namespace

Partition<Dialogue> select_multi_turn(std::vector<Dialogue> dialogues, LogProbProvider& provider,
                                      const MultiTurnOptions& o) {
  if (!(o.cr_low > 0.0 && o.cr_low < o.cr_high))
    throw ValidationError("context relevance band must satisfy 0 < cr_low < cr_high");
  auto outcomes = ordered_map(dialogues.size(), o.max_in_flight, [&](std::size_t i) {
    return judge_dialogue(std::move(dialogues[i]), provider, o);
  });
  Partition<Dialogue> out;
  for (auto& r : outcomes) {
    switch (r.fate) {
      case Fate::kept: out.kept.push_back(std::move(r.dialogue)); break;
      case Fate::rejected: out.rejected.push_back({std::move(r.dialogue), std::move(r.reason)}); break;
      case Fate::quarantined: out.quarantined.push_back({std::move(r.dialogue), std::move(r.reason)}); break;
    }
  }
  return out;
}

}  // namespace medcurate
