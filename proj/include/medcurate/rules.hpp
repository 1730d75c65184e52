#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "medcurate/digest.hpp"
#include "medcurate/records.hpp"

namespace medcurate {

// ---------------------------------------------------------------------------
// Rule-based cleaning
// ---------------------------------------------------------------------------

struct PiiPattern {
  std::string name;
  std::string source;
  std::regex regex;

  PiiPattern(std::string name, std::string source);
};

/// Phone (mainland mobile, NANP), e-mail and mainland resident ID shapes.
std::vector<PiiPattern> default_pii_patterns();

struct RuleSet {
  std::size_t min_tokens = 32;
  double max_special_char_ratio = 0.3;
  /// Entries are matched as case-folded substrings.
  std::vector<std::string> toxic_lexicon;
  std::vector<PiiPattern> pii_patterns = default_pii_patterns();

  /// Throws ValidationError.
  void validate() const;

  /// Builds a RuleSet from a config object. Recognized keys: min_tokens,
  /// max_special_char_ratio, toxic_lexicon (array), toxic_lexicon_file,
  /// pii_patterns_file, default_pii (bool, default true). Relative file
  /// paths resolve against `base_dir`.
  static RuleSet from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

/// One entry per non-empty line.
std::vector<std::string> load_lexicon(const std::filesystem::path& path);
/// One pattern per line, either `name<TAB>regex` or a bare regex; lines
/// starting with '#' are comments.
std::vector<PiiPattern> load_pii_patterns(const std::filesystem::path& path);

/// Word segments plus CJK characters (see text::word_tokens).
std::size_t token_count(std::string_view text);

/// Fraction of code points that are not letters, digits, CJK, whitespace
/// or common punctuation. Empty text yields 0.
double special_char_ratio(std::string_view text);

enum class Rule { length, special, toxic, pii };

inline constexpr std::array<Rule, 4> kDefaultRuleOrder = {Rule::length, Rule::special, Rule::toxic,
                                                          Rule::pii};

/// Reason string reported when `rule` rejects a document.
std::string_view rule_reason(Rule rule);

/// True when `rule` alone would keep the text.
bool rule_passes(Rule rule, std::string_view text, const RuleSet& rules);

/// Keeps the document iff every rule passes; otherwise the reason names
/// the first failing rule in `order`.
FilterDecision apply_rules(const Document& doc, const RuleSet& rules,
                           std::span<const Rule> order = kDefaultRuleOrder);

Partition<Document> filter_rules(std::vector<Document> docs, const RuleSet& rules);

// ---------------------------------------------------------------------------
// Exact deduplication
// ---------------------------------------------------------------------------

/// First-wins filter over content_hash. Single writer.
class Deduplicator {
 public:
  /// True if the text has not been seen before.
  bool admit(std::string_view text);
  std::size_t removed() const { return removed_; }

 private:
  std::unordered_set<Digest, DigestHash> seen_;
  std::size_t removed_ = 0;
};

/// Rejected records carry the reason "duplicate".
Partition<Document> dedup(std::vector<Document> docs);

// ---------------------------------------------------------------------------
// Benchmark decontamination by exact token n-gram overlap
// ---------------------------------------------------------------------------

struct BenchmarkText {
  std::string benchmark;
  std::string text;
};

class Decontaminator {
 public:
  static constexpr std::size_t kDefaultN = 13;

  /// Throws ValidationError if n < 5.
  Decontaminator(std::span<const BenchmarkText> benchmarks, std::size_t n = kDefaultN);

  /// Names of the benchmarks sharing at least one n-gram with `text`
  /// (sorted, unique). Empty means clean.
  std::vector<std::string> matches(std::string_view text) const;

  std::size_t n() const { return n_; }
  std::size_t ngram_count() const { return index_.size(); }

 private:
  std::size_t n_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::vector<std::size_t>> index_;
};

struct DecontaminationResult {
  Partition<Document> partition;
  /// Rejected documents per benchmark; a document matching two benchmarks
  /// counts toward both.
  std::map<std::string, std::size_t> hits;
};

/// Rejected records carry the reason "contaminated:<benchmark>[,<benchmark>...]".
DecontaminationResult decontaminate(std::vector<Document> docs, const Decontaminator& index);

/// Tokens joined with U+001F; the key type of the n-gram index.
std::string ngram_key(std::span<const std::string> tokens);

}  // namespace medcurate
