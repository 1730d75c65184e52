#include "medcurate/eval.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include "medcurate/concurrency.hpp"
#include "medcurate/errors.hpp"
#include "medcurate/templates.hpp"
#include "medcurate/text.hpp"

namespace medcurate {
namespace {

using json = nlohmann::json;

constexpr const char* kDimensions[] = {"fluency", "relevance", "completeness", "proficiency"};

// Top-level {...} spans of `s`, skipping over JSON string literals.
std::vector<std::string_view> brace_spans(std::string_view s) {
  std::vector<std::string_view> spans;
  int depth = 0;
  bool in_string = false, escaped = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (depth > 0 && in_string) {
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"' && depth > 0) {
      in_string = true;
    } else if (c == '{') {
      if (depth++ == 0) start = i;
    } else if (c == '}' && depth > 0) {
      if (--depth == 0) spans.push_back(s.substr(start, i - start + 1));
    }
  }
  return spans;
}

int read_rating(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("rubric reply is missing \"") + key + "\"");
  if (!it->is_number()) throw ParseError(std::string("rating \"") + key + "\" is not a number");
  const double v = it->get<double>();
  if (v != std::floor(v)) throw ParseError(std::string("rating \"") + key + "\" is not an integer");
  if (v < 1 || v > 5) throw ParseError(std::string("rating \"") + key + "\" out of range 1..5");
  return static_cast<int>(v);
}

std::string get_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw ValidationError(std::string("missing string field \"") + key + "\"");
  return it->get<std::string>();
}

template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const std::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

nlohmann::ordered_json means_json(const DimensionMeans& m) {
  return {{"fluency", m.fluency}, {"relevance", m.relevance}, {"completeness", m.completeness},
          {"proficiency", m.proficiency}};
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::win: return "win";
    case Outcome::loss: return "loss";
    case Outcome::tie: return "tie";
  }
  return "?";
}

PairwiseOutcome swap_consistent_outcome(Verdict forward, Verdict backward) {
  Outcome o = Outcome::tie;
  if (forward == Verdict::first && backward == Verdict::second)
    o = Outcome::win;
  else if (forward == Verdict::second && backward == Verdict::first)
    o = Outcome::loss;
  return {o, forward, backward};
}

PairwiseOutcome judge_single_turn(std::string_view question, std::string_view candidate, std::string_view reference,
                                  JudgeProvider& judge, const RetryPolicy& retry) {
  const auto& tpl = single_judge_template();
  auto ask = [&](std::string_view first, std::string_view second) {
    const auto prompt = tpl.render({{"user_query", std::string(question)},
                                    {"assistant1", std::string(first)},
                                    {"assistant2", std::string(second)}});
    return parse_verdict(with_retries(retry, [&] { return judge.complete({}, prompt); }));
  };
  const Verdict forward = ask(candidate, reference);
  const Verdict backward = ask(reference, candidate);
  return swap_consistent_outcome(forward, backward);
}

nlohmann::ordered_json PairwiseReport::to_json() const {
  return {{"wins", wins},         {"ties", ties},         {"losses", losses},       {"errors", errors},
          {"win_rate", win_rate}, {"tie_rate", tie_rate}, {"loss_rate", loss_rate}};
}

PairwiseReport aggregate(std::span<const PairwiseOutcome> outcomes, std::size_t errors) {
  if (outcomes.empty()) throw ValidationError("no pairwise outcomes to aggregate");
  PairwiseReport r;
  r.errors = errors;
  for (const auto& o : outcomes) {
    switch (o.outcome) {
      case Outcome::win: ++r.wins; break;
      case Outcome::tie: ++r.ties; break;
      case Outcome::loss: ++r.losses; break;
    }
  }
  const double n = static_cast<double>(outcomes.size());
  r.win_rate = static_cast<double>(r.wins) / n;
  r.tie_rate = static_cast<double>(r.ties) / n;
  r.loss_rate = static_cast<double>(r.losses) / n;
  return r;
}

RubricScores parse_rubric(std::string_view reply) {
  std::vector<json> objects;
  for (auto span : brace_spans(reply)) {
    json j = json::parse(span, nullptr, false);
    if (!j.is_discarded() && j.is_object()) objects.push_back(std::move(j));
  }
  if (objects.empty()) throw ParseError("rubric reply contains no JSON object");
  if (objects.size() > 1) throw ParseError("rubric reply contains more than one JSON object");
  const auto& obj = objects.front();
  return {read_rating(obj, kDimensions[0]), read_rating(obj, kDimensions[1]), read_rating(obj, kDimensions[2]),
          read_rating(obj, kDimensions[3])};
}

RubricScores judge_multi_turn_round(std::string_view history, std::string_view question, std::string_view solution,
                                    std::string_view answer, JudgeProvider& judge, const RetryPolicy& retry) {
  const auto prompt = multi_judge_template().render({{"history", std::string(history)},
                                                     {"question", std::string(question)},
                                                     {"solution", std::string(solution)},
                                                     {"answer", std::string(answer)}});
  return parse_rubric(with_retries(retry, [&] { return judge.complete({}, prompt); }));
}

nlohmann::ordered_json RubricReport::to_json() const {
  nlohmann::ordered_json j;
  j["per_round"] = nlohmann::ordered_json::array();
  for (const auto& [round, m] : per_round) {
    auto entry = means_json(m);
    entry["round"] = round;
    j["per_round"].push_back(std::move(entry));
  }
  j["overall"] = means_json(overall);
  j["rounds_scored"] = rounds_scored;
  j["errors"] = errors;
  return j;
}

RubricReport aggregate(std::span<const RoundScore> rounds, std::size_t errors) {
  if (rounds.empty()) throw ValidationError("no rubric scores to aggregate");
  struct Sum {
    double f = 0, r = 0, c = 0, p = 0;
    std::size_t n = 0;
  };
  std::map<std::size_t, Sum> by_round;
  for (const auto& rs : rounds) {
    auto& s = by_round[rs.round];
    s.f += rs.scores.fluency;
    s.r += rs.scores.relevance;
    s.c += rs.scores.completeness;
    s.p += rs.scores.proficiency;
    ++s.n;
  }
  RubricReport report;
  report.rounds_scored = rounds.size();
  report.errors = errors;
  for (const auto& [round, s] : by_round) {
    const double n = static_cast<double>(s.n);
    const DimensionMeans m{s.f / n, s.r / n, s.c / n, s.p / n};
    report.per_round.emplace_back(round, m);
    report.overall.fluency += m.fluency;
    report.overall.relevance += m.relevance;
    report.overall.completeness += m.completeness;
    report.overall.proficiency += m.proficiency;
  }
  const double k = static_cast<double>(report.per_round.size());
  report.overall.fluency /= k;
  report.overall.relevance /= k;
  report.overall.completeness /= k;
  report.overall.proficiency /= k;
  return report;
}

PairwiseRun evaluate_pairwise(std::span<const PairwiseItem> items, JudgeProvider& judge, const EvalOptions& opts) {
  PairwiseRun run;
  run.audit = ordered_map(items.size(), opts.max_in_flight, [&](std::size_t i) {
    PairwiseAudit a;
    a.id = items[i].id;
    try {
      a.outcome = judge_single_turn(items[i].question, items[i].candidate, items[i].reference, judge, opts.retry);
    } catch (const ParseError& e) {
      a.error = std::string("parse_error: ") + e.what();
    } catch (const ProviderError& e) {
      a.error = std::string("provider_error: ") + e.what();
    }
    return a;
  });
  std::vector<PairwiseOutcome> outcomes;
  std::size_t errors = 0;
  for (const auto& a : run.audit) {
    if (a.outcome)
      outcomes.push_back(*a.outcome);
    else
      ++errors;
  }
  if (outcomes.empty()) {
    run.report.errors = errors;
  } else {
    run.report = aggregate(outcomes, errors);
  }
  return run;
}

RubricRun evaluate_rubric(std::span<const RubricDialogue> dialogues, JudgeProvider& judge, const EvalOptions& opts) {
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t d = 0; d < dialogues.size(); ++d)
    for (std::size_t r = 0; r < dialogues[d].rounds.size(); ++r) jobs.emplace_back(d, r);

  RubricRun run;
  run.audit = ordered_map(jobs.size(), opts.max_in_flight, [&](std::size_t i) {
    const auto [d, r] = jobs[i];
    const auto& round = dialogues[d].rounds[r];
    RubricAudit a;
    a.id = dialogues[d].id;
    a.round = r + 1;
    try {
      a.scores = judge_multi_turn_round(round.history, round.question, round.solution, round.answer, judge, opts.retry);
    } catch (const ParseError& e) {
      a.error = std::string("parse_error: ") + e.what();
    } catch (const ProviderError& e) {
      a.error = std::string("provider_error: ") + e.what();
    }
    return a;
  });
  std::vector<RoundScore> scores;
  std::size_t errors = 0;
  for (const auto& a : run.audit) {
    if (a.scores)
      scores.push_back({a.round, *a.scores});
    else
      ++errors;
  }
  if (scores.empty())
    run.report.errors = errors;
  else
    run.report = aggregate(scores, errors);
  return run;
}

std::vector<AnswerRecord> read_answers(const std::filesystem::path& path) {
  std::vector<AnswerRecord> out;
  for_each_line(path, [&](const json& j) {
    out.push_back({get_string(j, "id"), get_string(j, "question"), get_string(j, "answer")});
  });
  return out;
}

std::vector<PairwiseItem> join_answers(std::span<const AnswerRecord> candidates,
                                       std::span<const AnswerRecord> references) {
  std::unordered_map<std::string, const AnswerRecord*> by_id;
  for (const auto& r : references) by_id.emplace(r.id, &r);
  std::vector<PairwiseItem> out;
  for (const auto& c : candidates) {
    auto it = by_id.find(c.id);
    if (it == by_id.end()) throw ValidationError("no reference answer for item " + c.id);
    out.push_back({c.id, c.question, c.answer, it->second->answer});
  }
  return out;
}

std::vector<RubricDialogue> read_rubric_dialogues(const std::filesystem::path& path) {
  std::vector<RubricDialogue> out;
  for_each_line(path, [&](const json& j) {
    RubricDialogue d;
    d.id = get_string(j, "id");
    for (const auto& r : j.at("rounds"))
      d.rounds.push_back({r.value("history", std::string{}), get_string(r, "question"), get_string(r, "solution"),
                          get_string(r, "answer")});
    out.push_back(std::move(d));
  });
  return out;
}

nlohmann::ordered_json audit_json(const PairwiseAudit& a) {
  nlohmann::ordered_json j;
  j["id"] = a.id;
  if (a.outcome) {
    j["outcome"] = to_string(a.outcome->outcome);
    j["forward"] = to_string(a.outcome->forward);
    j["backward"] = to_string(a.outcome->backward);
  } else {
    j["error"] = a.error;
  }
  return j;
}

nlohmann::ordered_json audit_json(const RubricAudit& a) {
  nlohmann::ordered_json j;
  j["id"] = a.id;
  j["round"] = a.round;
  if (a.scores) {
    j["fluency"] = a.scores->fluency;
    j["relevance"] = a.scores->relevance;
    j["completeness"] = a.scores->completeness;
    j["proficiency"] = a.scores->proficiency;
  } else {
    j["error"] = a.error;
  }
  return j;
}

}  // namespace medcurate
