#include "medcurate/rules.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <unicode/uchar.h>

#include "medcurate/errors.hpp"
#include "medcurate/text.hpp"

namespace medcurate {
namespace {

constexpr std::u32string_view kCommonPunctuation =
    U".,;:!?'\"()[]-/%"
    U"，。、；：？！“”‘’（）《》〈〉【】「」『』…\u2014\u2013·～％／";

bool is_plain_char(char32_t cp) {
  const auto c = static_cast<UChar32>(cp);
  if (u_hasBinaryProperty(c, UCHAR_ALPHABETIC)) return true;
  if (u_isdigit(c)) return true;
  if (U_GET_GC_MASK(c) & U_GC_M_MASK) return true;
  if (u_isUWhiteSpace(c)) return true;
  return kCommonPunctuation.find(cp) != std::u32string_view::npos;
}

bool contains_toxic(std::string_view text, const std::vector<std::string>& lexicon) {
  if (lexicon.empty()) return false;
  const std::string folded = text::case_fold(text);
  return std::any_of(lexicon.begin(), lexicon.end(), [&](const std::string& term) {
    return folded.find(text::case_fold(term)) != std::string::npos;
  });
}

bool contains_pii(std::string_view text, const std::vector<PiiPattern>& patterns) {
  return std::any_of(patterns.begin(), patterns.end(), [&](const PiiPattern& p) {
    return std::regex_search(text.begin(), text.end(), p.regex);
  });
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

PiiPattern::PiiPattern(std::string n, std::string src) : name(std::move(n)), source(std::move(src)) {
  try {
    regex = std::regex(source, std::regex::ECMAScript | std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw ValidationError("invalid PII pattern " + name + ": " + e.what());
  }
}

std::vector<PiiPattern> default_pii_patterns() {
  std::vector<PiiPattern> out;
  out.emplace_back("cn_mobile", R"((^|[^0-9])1[3-9][0-9][- ]?[0-9]{4}[- ]?[0-9]{4}($|[^0-9]))");
  out.emplace_back("nanp_phone",
                   R"((^|[^0-9])(\+?1[-. ]?)?\(?[2-9][0-9]{2}\)?[-. ][0-9]{3}[-. ][0-9]{4}($|[^0-9]))");
  out.emplace_back("email", R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
  out.emplace_back(
      "cn_resident_id",
      R"((^|[^0-9])[1-9][0-9]{5}(19|20)[0-9]{2}(0[1-9]|1[0-2])(0[1-9]|[12][0-9]|3[01])[0-9]{3}[0-9Xx]($|[^0-9A-Za-z]))");
  return out;
}

void RuleSet::validate() const {
  if (min_tokens < 1) throw ValidationError("min_tokens must be >= 1");
  if (!(max_special_char_ratio >= 0.0 && max_special_char_ratio <= 1.0))
    throw ValidationError("max_special_char_ratio must lie in [0, 1]");
  for (const auto& term : toxic_lexicon)
    if (term.empty()) throw ValidationError("toxic lexicon contains an empty entry");
}

RuleSet RuleSet::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  RuleSet rules;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  if (j.contains("min_tokens")) {
    const auto v = j.at("min_tokens").get<long long>();
    if (v < 1) throw ValidationError("min_tokens must be >= 1");
    rules.min_tokens = static_cast<std::size_t>(v);
  }
  if (j.contains("max_special_char_ratio"))
    rules.max_special_char_ratio = j.at("max_special_char_ratio").get<double>();
  if (j.contains("toxic_lexicon"))
    rules.toxic_lexicon = j.at("toxic_lexicon").get<std::vector<std::string>>();
  if (j.contains("toxic_lexicon_file")) {
    auto more = load_lexicon(resolve(j.at("toxic_lexicon_file").get<std::string>()));
    rules.toxic_lexicon.insert(rules.toxic_lexicon.end(), more.begin(), more.end());
  }
  if (!j.value("default_pii", true)) rules.pii_patterns.clear();
  if (j.contains("pii_patterns_file")) {
    auto more = load_pii_patterns(resolve(j.at("pii_patterns_file").get<std::string>()));
    for (auto& p : more) rules.pii_patterns.push_back(std::move(p));
  }
  rules.validate();
  return rules;
}

std::vector<std::string> load_lexicon(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for (auto& line : read_lines(path)) {
    auto entry = text::trim(line);
    if (!entry.empty() && entry[0] != '#') out.push_back(std::move(entry));
  }
  return out;
}

std::vector<PiiPattern> load_pii_patterns(const std::filesystem::path& path) {
  std::vector<PiiPattern> out;
  for (const auto& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      out.emplace_back("pattern" + std::to_string(out.size() + 1), line);
    else
      out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

std::size_t token_count(std::string_view text) { return text::word_tokens(text).size(); }

double special_char_ratio(std::string_view text) {
  const auto cps = text::code_points(text);
  if (cps.empty()) return 0.0;
  const auto special = std::count_if(cps.begin(), cps.end(), [](char32_t c) { return !is_plain_char(c); });
  return static_cast<double>(special) / static_cast<double>(cps.size());
}

std::string_view rule_reason(Rule rule) {
  switch (rule) {
    case Rule::length: return "min_tokens";
    case Rule::special: return "special_chars";
    case Rule::toxic: return "toxic";
    case Rule::pii: return "pii";
  }
  return "?";
}

bool rule_passes(Rule rule, std::string_view text, const RuleSet& rules) {
  switch (rule) {
    case Rule::length: return token_count(text) >= rules.min_tokens;
    case Rule::special: return special_char_ratio(text) <= rules.max_special_char_ratio;
    case Rule::toxic: return !contains_toxic(text, rules.toxic_lexicon);
    case Rule::pii: return !contains_pii(text, rules.pii_patterns);
  }
  return false;
}

FilterDecision apply_rules(const Document& doc, const RuleSet& rules, std::span<const Rule> order) {
  for (Rule r : order)
    if (!rule_passes(r, doc.text, rules)) return FilterDecision::reject(std::string(rule_reason(r)));
  return FilterDecision::accept();
}

Partition<Document> filter_rules(std::vector<Document> docs, const RuleSet& rules) {
  rules.validate();
  Partition<Document> out;
  for (auto& d : docs) {
    auto decision = apply_rules(d, rules);
    if (decision.keep)
      out.kept.push_back(std::move(d));
    else
      out.rejected.push_back({std::move(d), std::move(decision.reason)});
  }
  return out;
}

bool Deduplicator::admit(std::string_view text) {
  if (seen_.insert(content_hash(text)).second) return true;
  ++removed_;
  return false;
}

Partition<Document> dedup(std::vector<Document> docs) {
  Deduplicator seen;
  Partition<Document> out;
  for (auto& d : docs) {
    if (seen.admit(d.text))
      out.kept.push_back(std::move(d));
    else
      out.rejected.push_back({std::move(d), "duplicate"});
  }
  return out;
}

std::string ngram_key(std::span<const std::string> tokens) {
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) key.push_back('\x1f');
    key += tokens[i];
  }
  return key;
}

Decontaminator::Decontaminator(std::span<const BenchmarkText> benchmarks, std::size_t n) : n_(n) {
  if (n_ < 5) throw ValidationError("decontamination n-gram size must be >= 5");
  std::map<std::string, std::size_t> ids;
  for (const auto& b : benchmarks) ids.emplace(b.benchmark, 0);
  for (auto& [name, id] : ids) {
    id = names_.size();
    names_.push_back(name);
  }
  for (const auto& b : benchmarks) {
    const std::size_t id = ids.at(b.benchmark);
    const auto tokens = text::normalized_tokens(b.text);
    for (std::size_t i = 0; i + n_ <= tokens.size(); ++i) {
      auto& owners = index_[ngram_key(std::span(tokens).subspan(i, n_))];
      if (std::find(owners.begin(), owners.end(), id) == owners.end()) owners.push_back(id);
    }
  }
}

std::vector<std::string> Decontaminator::matches(std::string_view text) const {
  std::set<std::size_t> hit;
  const auto tokens = text::normalized_tokens(text);
  for (std::size_t i = 0; i + n_ <= tokens.size() && hit.size() < names_.size(); ++i) {
    auto it = index_.find(ngram_key(std::span(tokens).subspan(i, n_)));
    if (it != index_.end()) hit.insert(it->second.begin(), it->second.end());
  }
  std::vector<std::string> out;
  for (auto id : hit) out.push_back(names_[id]);
  return out;
}

DecontaminationResult decontaminate(std::vector<Document> docs, const Decontaminator& index) {
  DecontaminationResult out;
  for (auto& d : docs) {
    const auto names = index.matches(d.text);
    if (names.empty()) {
      out.partition.kept.push_back(std::move(d));
      continue;
    }
    std::string reason = "contaminated:";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) reason += ',';
      reason += names[i];
      out.hits[names[i]]++;
    }
    out.partition.rejected.push_back({std::move(d), std::move(reason)});
  }
  return out;
}

}  // namespace medcurate
