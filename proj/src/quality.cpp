#include "medcurate/quality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "medcurate/concurrency.hpp"

namespace medcurate {
namespace {

void check_score(double s, const char* what) {
  if (!(s >= kQualityMin && s <= kQualityMax)) {
    std::ostringstream msg;
    msg << what << " " << s << " outside [0, 6]";
    throw ValidationError(msg.str());
  }
}

GateResult quarantine(Document doc, const std::exception& e) {
  doc.meta["error"] = e.what();
  return {std::move(doc), FilterDecision::reject(std::string(kQuarantined)), true};
}

Partition<Document> collect(std::vector<GateResult> results) {
  Partition<Document> out;
  for (auto& r : results) {
    if (r.decision.keep)
      out.kept.push_back(std::move(r.doc));
    else if (r.quarantined)
      out.quarantined.push_back({std::move(r.doc), std::move(r.decision.reason)});
    else
      out.rejected.push_back({std::move(r.doc), std::move(r.decision.reason)});
  }
  return out;
}

}  // namespace

bool double_score_consistent(double s1, double s2, double max_gap) {
  check_score(s1, "score");
  check_score(s2, "score");
  if (!(max_gap >= 0.0)) throw ValidationError("max_gap must be non-negative");
  return std::fabs(s1 - s2) < max_gap;
}

GateResult gate_by_domain(Document doc, ScoreProvider& provider, std::string_view target_label,
                          const RetryPolicy& retry) {
  const auto taxonomy = provider.taxonomy();
  if (std::find(taxonomy.begin(), taxonomy.end(), target_label) == taxonomy.end())
    throw ConfigError("label \"" + std::string(target_label) + "\" is not in the taxonomy of " +
                      provider.identity());
  std::string label;
  try {
    label = with_retries(retry, [&] {
      auto l = provider.classify(doc.text);
      if (std::find(taxonomy.begin(), taxonomy.end(), l) == taxonomy.end())
        throw ProviderError("classifier returned undeclared label \"" + l + "\"", false);
      return l;
    });
  } catch (const ProviderError& e) {
    return quarantine(std::move(doc), e);
  }
  doc.meta["domain_label"] = label;
  auto decision = label == target_label ? FilterDecision::accept() : FilterDecision::reject("domain:" + label);
  return {std::move(doc), std::move(decision), false};
}

GateResult gate_by_quality(Document doc, ScoreProvider& provider, double threshold, const RetryPolicy& retry) {
  check_score(threshold, "threshold");
  double score = 0.0;
  try {
    score = with_retries(retry, [&] {
      const double s = provider.quality(doc.text);
      if (!(s >= kQualityMin && s <= kQualityMax))
        throw ProviderError("quality score " + std::to_string(s) + " outside [0, 6]", false);
      return s;
    });
  } catch (const ProviderError& e) {
    return quarantine(std::move(doc), e);
  }
  doc.scores["quality"] = score;
  auto decision = score >= threshold ? FilterDecision::accept() : FilterDecision::reject("low_quality");
  return {std::move(doc), std::move(decision), false};
}

Partition<Document> gate_all_by_domain(std::vector<Document> docs, ScoreProvider& provider,
                                       std::string_view target_label, const GateOptions& opts) {
  const auto taxonomy = provider.taxonomy();
  if (std::find(taxonomy.begin(), taxonomy.end(), target_label) == taxonomy.end())
    throw ConfigError("label \"" + std::string(target_label) + "\" is not in the taxonomy of " +
                      provider.identity());
  auto results = ordered_map(docs.size(), opts.max_in_flight, [&](std::size_t i) {
    return gate_by_domain(std::move(docs[i]), provider, target_label, opts.retry);
  });
  return collect(std::move(results));
}

Partition<Document> gate_all_by_quality(std::vector<Document> docs, ScoreProvider& provider, double threshold,
                                        const GateOptions& opts) {
  check_score(threshold, "threshold");
  auto results = ordered_map(docs.size(), opts.max_in_flight, [&](std::size_t i) {
    return gate_by_quality(std::move(docs[i]), provider, threshold, opts.retry);
  });
  return collect(std::move(results));
}

}  // namespace medcurate
