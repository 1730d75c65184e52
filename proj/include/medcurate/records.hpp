#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace medcurate {

enum class Lang { zh, en };
enum class Role { user, assistant };
enum class PairKind { subjective, objective };

std::string_view to_string(Lang);
std::string_view to_string(Role);
std::string_view to_string(PairKind);
Lang parse_lang(std::string_view);
Role parse_role(std::string_view);
PairKind parse_pair_kind(std::string_view);

using ScoreMap = std::map<std::string, double>;
using MetaMap = std::map<std::string, std::string>;

/// One pre-training or SFT candidate text.
struct Document {
  std::string id;
  Lang lang = Lang::zh;
  std::string source;
  std::string text;
  MetaMap meta;
  ScoreMap scores;

  friend bool operator==(const Document&, const Document&) = default;
};

/// Throws ValidationError unless id is nonempty and the canonical text is nonempty.
void validate(const Document&);

struct Turn {
  Role role = Role::user;
  std::string text;

  friend bool operator==(const Turn&, const Turn&) = default;
};

/// Alternating user/assistant turns, starting with the user and ending with
/// the assistant. The constructor rejects any other shape.
class Dialogue {
 public:
  Dialogue(std::string id, Lang lang, std::vector<Turn> turns, ScoreMap scores = {});

  const std::string& id() const { return id_; }
  Lang lang() const { return lang_; }
  const std::vector<Turn>& turns() const { return turns_; }
  std::size_t exchanges() const { return turns_.size() / 2; }

  const ScoreMap& scores() const { return scores_; }
  ScoreMap& scores() { return scores_; }

  friend bool operator==(const Dialogue&, const Dialogue&) = default;

 private:
  std::string id_;
  Lang lang_;
  std::vector<Turn> turns_;
  ScoreMap scores_;
};

/// Multiple-choice question; option labels are drawn from A..E.
struct MCQItem {
  std::string id;
  std::string stem;
  std::map<std::string, std::string> options;
  std::string gold;

  friend bool operator==(const MCQItem&, const MCQItem&) = default;
};

void validate(const MCQItem&);

struct PreferencePair {
  std::string id;
  std::string prompt;
  std::string chosen;
  std::string rejected;
  PairKind kind = PairKind::subjective;

  friend bool operator==(const PreferencePair&, const PreferencePair&) = default;
};

void validate(const PreferencePair&);

/// Outcome of one predicate or gate. `reason` is empty iff `keep`.
struct FilterDecision {
  bool keep = true;
  std::string reason;

  static FilterDecision accept() { return {true, {}}; }
  static FilterDecision reject(std::string reason) { return {false, std::move(reason)}; }

  friend bool operator==(const FilterDecision&, const FilterDecision&) = default;
};

/// Reason recorded when a model-backed step keeps failing and the record
/// is set aside for audit instead of being dropped.
inline constexpr std::string_view kQuarantined = "quarantined";

template <class Record>
struct Rejection {
  Record record;
  std::string reason;
};

/// Three-way split produced by every filtering stage. Each input record
/// lands in exactly one of the three lists; order within a list follows
/// input order.
template <class Record>
struct Partition {
  std::vector<Record> kept;
  std::vector<Rejection<Record>> rejected;
  std::vector<Rejection<Record>> quarantined;

  std::size_t total() const { return kept.size() + rejected.size() + quarantined.size(); }

  /// Rejection counts keyed by the reason's bucket (text before the first ':').
  std::map<std::string, std::size_t> reason_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : rejected) counts[r.reason.substr(0, r.reason.find(':'))]++;
    if (!quarantined.empty()) counts[std::string(kQuarantined)] += quarantined.size();
    return counts;
  }
};

}  // namespace medcurate
