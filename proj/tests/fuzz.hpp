#pragma once

// Random inputs shared by the property tests.

#include <string>
#include <vector>

#include "medcurate/random.hpp"
#include "medcurate/records.hpp"
#include "medcurate/rules.hpp"

namespace fuzz {

inline const std::vector<std::string> kWords = {
    "patient", "fever", "cough", "dose", "the", "of", "blood", "pressure", "Daily", "TABLET",
    "患者", "发热", "咳嗽", "治疗", "a", "and", "idiot", "CT", "x-ray", "5mg"};
inline const std::vector<std::string> kNoise = {"###", "$$", "@@@", "~~", "**", "|||", "{}", "<>"};

inline std::string random_text(medcurate::Rng& rng, std::size_t max_words = 60) {
  std::string out;
  const std::size_t n = rng.below(max_words) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += rng.below(8) == 0 ? "  " : " ";
    const auto roll = rng.below(100);
    if (roll < 6)
      out += kNoise[rng.below(kNoise.size())];
    else if (roll < 7)
      out += "138-0000-0000";
    else if (roll < 8)
      out += "someone@example.org";
    else
      out += kWords[rng.below(kWords.size())];
  }
  return out;
}

/// `n` documents; roughly one in ten repeats an earlier text with altered
/// whitespace so dedup has work to do.
inline std::vector<medcurate::Document> random_corpus(std::uint64_t seed, std::size_t n, std::size_t max_words = 60) {
  medcurate::Rng rng(seed);
  std::vector<medcurate::Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    std::string t;
    if (!docs.empty() && rng.below(10) == 0) {
      t = "  " + docs[rng.below(docs.size())].text + "\n";
    } else {
      t = random_text(rng, max_words);
    }
    docs.push_back({"doc-" + std::to_string(i), rng.below(2) ? medcurate::Lang::en : medcurate::Lang::zh, "fuzz",
                    std::move(t), {}, {}});
  }
  return docs;
}

inline medcurate::RuleSet fuzz_rules() {
  medcurate::RuleSet r;
  r.min_tokens = 12;
  r.max_special_char_ratio = 0.08;
  r.toxic_lexicon = {"idiot"};
  return r;
}

/// Brute-force contamination oracle: compares every n-token window of the
/// document with every n-token window of every benchmark text.
inline std::vector<std::string> brute_force_matches(const std::string& doc,
                                                    const std::vector<medcurate::BenchmarkText>& bench,
                                                    std::size_t n,
                                                    std::vector<std::string> (*tokenize)(std::string_view)) {
  const auto d = tokenize(doc);
  std::vector<std::string> names;
  for (const auto& b : bench) {
    const auto t = tokenize(b.text);
    bool hit = false;
    for (std::size_t i = 0; !hit && i + n <= d.size(); ++i)
      for (std::size_t j = 0; !hit && j + n <= t.size(); ++j) {
        bool same = true;
        for (std::size_t k = 0; same && k < n; ++k) same = d[i + k] == t[j + k];
        hit = same;
      }
    if (hit) names.push_back(b.benchmark);
  }
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

}  // namespace fuzz
