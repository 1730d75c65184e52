#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "medcurate/judge.hpp"

namespace medcurate {

// ---------------------------------------------------------------------------
// Pairwise judging with order swap
// ---------------------------------------------------------------------------

enum class Outcome { win, loss, tie };

std::string_view to_string(Outcome);

struct PairwiseOutcome {
  Outcome outcome = Outcome::tie;
  Verdict forward = Verdict::equal;   // candidate in slot 1
  Verdict backward = Verdict::equal;  // candidate in slot 2

  friend bool operator==(const PairwiseOutcome&, const PairwiseOutcome&) = default;
};

/// win iff forward = first and backward = second; loss iff forward = second
/// and backward = first; every other combination is a tie.
PairwiseOutcome swap_consistent_outcome(Verdict forward, Verdict backward);

/// Judges (candidate, reference) and then (reference, candidate) with the
/// single-round template. Throws ParseError on an unlabeled reply and
/// ProviderError once retries are exhausted.
PairwiseOutcome judge_single_turn(std::string_view question, std::string_view candidate, std::string_view reference,
                                  JudgeProvider& judge, const RetryPolicy& retry = {});

struct PairwiseReport {
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  /// Items whose judging failed; excluded from the rates.
  std::size_t errors = 0;
  double win_rate = 0.0;
  double tie_rate = 0.0;
  double loss_rate = 0.0;

  nlohmann::ordered_json to_json() const;
};

/// Throws ValidationError when `outcomes` is empty.
PairwiseReport aggregate(std::span<const PairwiseOutcome> outcomes, std::size_t errors = 0);

// ---------------------------------------------------------------------------
// Per-round rubric scoring
// ---------------------------------------------------------------------------

struct RubricScores {
  int fluency = 0;
  int relevance = 0;
  int completeness = 0;
  int proficiency = 0;

  friend bool operator==(const RubricScores&, const RubricScores&) = default;
};

/// Extracts the single JSON object in a judge reply and reads the four
/// integer ratings, each in 1..5. Throws ParseError when there is no
/// object, more than one, a missing key, a non-integer or out-of-range value.
RubricScores parse_rubric(std::string_view reply);

RubricScores judge_multi_turn_round(std::string_view history, std::string_view question, std::string_view solution,
                                    std::string_view answer, JudgeProvider& judge, const RetryPolicy& retry = {});

struct RoundScore {
  std::size_t round = 0;  // 1-based round within its dialogue
  RubricScores scores;
};

struct DimensionMeans {
  double fluency = 0.0;
  double relevance = 0.0;
  double completeness = 0.0;
  double proficiency = 0.0;
};

struct RubricReport {
  /// (round, mean over every dialogue that reached that round), ascending.
  std::vector<std::pair<std::size_t, DimensionMeans>> per_round;
  /// Mean of the per-round means.
  DimensionMeans overall;
  std::size_t rounds_scored = 0;
  std::size_t errors = 0;

  nlohmann::ordered_json to_json() const;
};

/// Throws ValidationError when `rounds` is empty.
RubricReport aggregate(std::span<const RoundScore> rounds, std::size_t errors = 0);

// ---------------------------------------------------------------------------
// Batch runners
// ---------------------------------------------------------------------------

struct EvalOptions {
  std::size_t max_in_flight = 8;
  RetryPolicy retry;
};

struct PairwiseItem {
  std::string id;
  std::string question;
  std::string candidate;
  std::string reference;
};

struct PairwiseAudit {
  std::string id;
  std::optional<PairwiseOutcome> outcome;
  std::string error;  // set iff outcome is empty
};

struct PairwiseRun {
  std::vector<PairwiseAudit> audit;  // input order
  PairwiseReport report;
};

PairwiseRun evaluate_pairwise(std::span<const PairwiseItem> items, JudgeProvider& judge, const EvalOptions& opts = {});

struct RubricRound {
  std::string history;
  std::string question;
  std::string solution;
  std::string answer;
};

struct RubricDialogue {
  std::string id;
  std::vector<RubricRound> rounds;
};

struct RubricAudit {
  std::string id;
  std::size_t round = 0;
  std::optional<RubricScores> scores;
  std::string error;
};

struct RubricRun {
  std::vector<RubricAudit> audit;
  RubricReport report;
};

RubricRun evaluate_rubric(std::span<const RubricDialogue> dialogues, JudgeProvider& judge,
                          const EvalOptions& opts = {});

/// Answer files for pairwise evaluation: JSON Lines of {"id","question","answer"}.
struct AnswerRecord {
  std::string id;
  std::string question;
  std::string answer;
};
std::vector<AnswerRecord> read_answers(const std::filesystem::path& path);

/// Joins candidates with references by id, in candidate order. Throws
/// ValidationError for a candidate without a reference.
std::vector<PairwiseItem> join_answers(std::span<const AnswerRecord> candidates,
                                       std::span<const AnswerRecord> references);

/// Rubric input: JSON Lines of
/// {"id", "rounds": [{"history","question","solution","answer"}, ...]}.
std::vector<RubricDialogue> read_rubric_dialogues(const std::filesystem::path& path);

nlohmann::ordered_json audit_json(const PairwiseAudit&);
nlohmann::ordered_json audit_json(const RubricAudit&);

}  // namespace medcurate
