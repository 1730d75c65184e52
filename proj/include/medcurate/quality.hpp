#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "medcurate/records.hpp"
#include "medcurate/retry.hpp"

namespace medcurate {

/// Domain classifier and 0..6 quality regressor behind one interface.
/// Implementations must be safe for concurrent calls.
class ScoreProvider {
 public:
  virtual ~ScoreProvider() = default;

  virtual std::string identity() const = 0;
  /// Labels classify() may return.
  virtual std::vector<std::string> taxonomy() const = 0;
  virtual std::string classify(std::string_view text) = 0;
  /// Quality on the closed scale [0, 6].
  virtual double quality(std::string_view text) = 0;
};

inline constexpr double kQualityMin = 0.0;
inline constexpr double kQualityMax = 6.0;
inline constexpr double kDefaultQualityThreshold = 4.0;
inline constexpr double kDefaultMaxScoreGap = 2.0;

/// Whether two independent quality scores agree closely enough to keep a
/// sample for scorer training: |s1 - s2| < max_gap (strict).
/// Throws ValidationError for scores outside [0, 6].
bool double_score_consistent(double s1, double s2, double max_gap = kDefaultMaxScoreGap);

struct GateResult {
  Document doc;
  FilterDecision decision;
  bool quarantined = false;
};

/// Keeps iff the provider's label equals `target_label`. The label is stored
/// in doc.meta["domain_label"]. After `retry.max_attempts` failed calls the
/// record is quarantined with the error in doc.meta["error"].
/// Throws ConfigError if target_label is outside the provider taxonomy.
GateResult gate_by_domain(Document doc, ScoreProvider& provider, std::string_view target_label,
                          const RetryPolicy& retry = {});

/// Keeps iff quality >= threshold. The score is stored in doc.scores["quality"].
GateResult gate_by_quality(Document doc, ScoreProvider& provider,
                           double threshold = kDefaultQualityThreshold, const RetryPolicy& retry = {});

struct GateOptions {
  RetryPolicy retry;
  std::size_t max_in_flight = 8;
};

Partition<Document> gate_all_by_domain(std::vector<Document> docs, ScoreProvider& provider,
                                       std::string_view target_label, const GateOptions& opts = {});
Partition<Document> gate_all_by_quality(std::vector<Document> docs, ScoreProvider& provider,
                                        double threshold = kDefaultQualityThreshold,
                                        const GateOptions& opts = {});

}  // namespace medcurate
