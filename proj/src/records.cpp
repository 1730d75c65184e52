#include "medcurate/records.hpp"

#include <algorithm>
#include <set>

#include "medcurate/errors.hpp"
#include "medcurate/text.hpp"

namespace medcurate {

std::string_view to_string(Lang l) { return l == Lang::zh ? "zh" : "en"; }
std::string_view to_string(Role r) { return r == Role::user ? "user" : "assistant"; }
std::string_view to_string(PairKind k) { return k == PairKind::subjective ? "subjective" : "objective"; }

Lang parse_lang(std::string_view s) {
  if (s == "zh") return Lang::zh;
  if (s == "en") return Lang::en;
  throw ValidationError("lang must be \"zh\" or \"en\", got \"" + std::string(s) + "\"");
}

Role parse_role(std::string_view s) {
  if (s == "user") return Role::user;
  if (s == "assistant") return Role::assistant;
  throw ValidationError("role must be \"user\" or \"assistant\", got \"" + std::string(s) + "\"");
}

PairKind parse_pair_kind(std::string_view s) {
  if (s == "subjective") return PairKind::subjective;
  if (s == "objective") return PairKind::objective;
  throw ValidationError("kind must be \"subjective\" or \"objective\", got \"" + std::string(s) + "\"");
}

void validate(const Document& d) {
  if (d.id.empty()) throw ValidationError("document id is empty");
  if (text::canonicalize(d.text).empty())
    throw ValidationError("document " + d.id + " has empty text after normalization");
}

Dialogue::Dialogue(std::string id, Lang lang, std::vector<Turn> turns, ScoreMap scores)
    : id_(std::move(id)), lang_(lang), turns_(std::move(turns)), scores_(std::move(scores)) {
  if (id_.empty()) throw ValidationError("dialogue id is empty");
  if (turns_.empty()) throw ValidationError("dialogue " + id_ + " has no turns");
  if (turns_.size() % 2 != 0)
    throw ValidationError("dialogue " + id_ + " has an odd number of turns");
  for (std::size_t i = 0; i < turns_.size(); ++i) {
    const Role expected = i % 2 == 0 ? Role::user : Role::assistant;
    if (turns_[i].role != expected)
      throw ValidationError("dialogue " + id_ + ": turn " + std::to_string(i) + " should be " +
                            std::string(to_string(expected)));
    if (turns_[i].text.empty())
      throw ValidationError("dialogue " + id_ + ": turn " + std::to_string(i) + " is empty");
  }
}

void validate(const MCQItem& m) {
  static const std::set<std::string> labels = {"A", "B", "C", "D", "E"};
  if (m.id.empty()) throw ValidationError("mcq id is empty");
  if (m.options.size() < 2) throw ValidationError("mcq " + m.id + " needs at least two options");
  std::set<std::string> texts;
  for (const auto& [label, option] : m.options) {
    if (!labels.contains(label)) throw ValidationError("mcq " + m.id + ": bad option label " + label);
    if (option.empty()) throw ValidationError("mcq " + m.id + ": option " + label + " is empty");
    if (!texts.insert(option).second)
      throw ValidationError("mcq " + m.id + ": duplicate option text");
  }
  if (!m.options.contains(m.gold)) throw ValidationError("mcq " + m.id + ": gold label not among options");
}

void validate(const PreferencePair& p) {
  if (p.id.empty()) throw ValidationError("pair id is empty");
  if (p.prompt.empty() || p.chosen.empty() || p.rejected.empty())
    throw ValidationError("pair " + p.id + " has an empty text field");
  if (p.chosen == p.rejected) throw ValidationError("pair " + p.id + ": chosen equals rejected");
}

}  // namespace medcurate
