#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medcurate/logprob.hpp"
#include "medcurate/records.hpp"
#include "medcurate/retry.hpp"

namespace medcurate {

// ---------------------------------------------------------------------------
// Complexity x quality scoring
// ---------------------------------------------------------------------------

struct DeitaScores {
  double complexity = 0.0;
  double quality = 0.0;
  double combined = 0.0;  // complexity * quality

  /// Throws ValidationError on negative input.
  static DeitaScores make(double complexity, double quality);
};

/// c * q. Throws ValidationError if either is negative or not finite.
double combine_scores(double complexity, double quality);

/// Arithmetic mean of per-exchange combined scores. Throws on empty input.
double dialogue_deita_score(std::span<const double> per_turn);

/// Instruction-complexity and response-quality scorers used to annotate
/// SFT candidates. Implementations must be safe for concurrent calls.
class DeitaScorer {
 public:
  virtual ~DeitaScorer() = default;
  virtual std::string identity() const = 0;
  virtual double complexity(std::string_view instruction) = 0;
  virtual double quality(std::string_view instruction, std::string_view response) = 0;
};

// Score keys. Single-exchange records use the bare keys; multi-turn records
// carry one entry per exchange, e.g. "complexity.0", "quality.0", "deita.0".
inline constexpr std::string_view kComplexityKey = "complexity";
inline constexpr std::string_view kQualityKey = "quality";
inline constexpr std::string_view kDeitaKey = "deita";

std::string exchange_key(std::string_view base, std::size_t exchange);

/// Fills complexity.k / quality.k / deita.k for every exchange k (and the
/// bare keys for a single-exchange dialogue) using the scorer.
Dialogue annotate_deita(Dialogue dialogue, DeitaScorer& scorer, const RetryPolicy& retry = {});

/// Per-exchange combined scores read from the scores map: deita.k if present,
/// else complexity.k * quality.k. For a single exchange the bare keys are
/// accepted too. Returns nothing if any exchange lacks scores.
std::optional<std::vector<double>> exchange_deita_scores(const Dialogue& dialogue);

/// Keeps dialogues whose combined score is >= threshold. Records without
/// scores are quarantined with reason "missing_scores".
Partition<Dialogue> select_single_turn(std::vector<Dialogue> records, double threshold);

// ---------------------------------------------------------------------------
// Context relevance
// ---------------------------------------------------------------------------

inline constexpr double kDegenerateEpsilon = 1e-6;

/// "User: {text}\n" / "Doctor: {text}\n" in English,
/// "用户：{text}\n" / "医生：{text}\n" in Chinese.
std::string render_turn(Lang lang, const Turn& turn);
/// Opening of an assistant turn: "Doctor: " or "医生：".
std::string_view assistant_prefix(Lang lang);

/// Context for scoring assistant turn `turn_index`: every earlier turn
/// rendered in order (only when `with_history`), then the current user turn,
/// then the assistant prefix.
std::string scoring_context(const Dialogue& dialogue, std::size_t turn_index, bool with_history);

/// Mean NLL of assistant turn `turn_index` given all prior turns.
/// Throws ValidationError unless turn_index names an assistant turn.
double conditioned_information_score(LogProbProvider& provider, const Dialogue& dialogue,
                                     std::size_t turn_index);

/// Mean NLL of assistant turn `turn_index` given only its own user turn.
double direct_information_score(LogProbProvider& provider, const Dialogue& dialogue,
                                std::size_t turn_index);

struct CRResult {
  double conditioned = 0.0;
  double direct = 0.0;
  double ratio = 0.0;  // conditioned / direct
};

/// Ratio > 1: history hurts the prediction. Ratio well below 1: the turn
/// mostly repeats its history. Throws RedundancyDegenerate when the direct
/// score is <= epsilon.
CRResult context_relevance(LogProbProvider& provider, const Dialogue& dialogue, std::size_t turn_index,
                           double epsilon = kDegenerateEpsilon);

struct MultiTurnOptions {
  double deita_threshold = 0.0;
  double cr_low = 0.5;
  double cr_high = 1.0;
  double epsilon = kDegenerateEpsilon;
  std::size_t max_in_flight = 8;
  RetryPolicy retry;
};

/// Keeps a dialogue iff its mean Deita score is >= deita_threshold and every
/// assistant turn with nonempty history has cr_low <= CR <= cr_high.
/// Writes "deita" and "cr.<turn_index>" into the kept and rejected records.
/// Rejection reasons: "deita_below_threshold", "cr_low:turn <i>",
/// "cr_high:turn <i>", "cr_degenerate:turn <i>". Missing Deita scores and
/// provider failures quarantine the dialogue.
Partition<Dialogue> select_multi_turn(std::vector<Dialogue> dialogues, LogProbProvider& provider,
                                      const MultiTurnOptions& options);

}  // namespace medcurate
