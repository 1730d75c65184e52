#include "medcurate/jsonl.hpp"

#include <cmath>

#include <json.hpp>

#include "medcurate/text.hpp"

namespace medcurate {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_object(std::string_view line) {
  if (!text::is_valid_utf8(line)) throw ValidationError("line is not valid UTF-8");
  json j = json::parse(line);
  if (!j.is_object()) throw ValidationError("record must be a JSON object");
  return j;
}

std::string get_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field \"") + key + "\"");
  if (!it->is_string()) throw ValidationError(std::string("field \"") + key + "\" must be a string");
  return it->get<std::string>();
}

ScoreMap get_scores(const json& j) {
  ScoreMap out;
  auto it = j.find("scores");
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_object()) throw ValidationError("field \"scores\" must be an object");
  for (const auto& [k, v] : it->items()) {
    if (!v.is_number()) throw ValidationError("score \"" + k + "\" must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ValidationError("score \"" + k + "\" is not finite");
    out.emplace(k, x);
  }
  return out;
}

MetaMap get_meta(const json& j) {
  MetaMap out;
  auto it = j.find("meta");
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_object()) throw ValidationError("field \"meta\" must be an object");
  for (const auto& [k, v] : it->items()) {
    if (!v.is_string()) throw ValidationError("meta \"" + k + "\" must be a string");
    out.emplace(k, v.get<std::string>());
  }
  return out;
}

ordered_json scores_json(const ScoreMap& s) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : s) j[k] = v;
  return j;
}

}  // namespace

Schema parse_schema(std::string_view s) {
  if (s == "document") return Schema::document;
  if (s == "dialogue") return Schema::dialogue;
  if (s == "mcq") return Schema::mcq;
  if (s == "pair") return Schema::pair;
  throw ConfigError("unknown record schema \"" + std::string(s) + "\"");
}

std::string_view to_string(Schema s) {
  switch (s) {
    case Schema::document: return "document";
    case Schema::dialogue: return "dialogue";
    case Schema::mcq: return "mcq";
    case Schema::pair: return "pair";
  }
  return "?";
}

template <>
Document parse_record<Document>(std::string_view line) {
  const json j = parse_object(line);
  Document d;
  d.id = get_string(j, "id");
  d.lang = parse_lang(get_string(j, "lang"));
  d.source = get_string(j, "source");
  d.text = get_string(j, "text");
  d.meta = get_meta(j);
  d.scores = get_scores(j);
  validate(d);
  return d;
}

template <>
Dialogue parse_record<Dialogue>(std::string_view line) {
  const json j = parse_object(line);
  auto it = j.find("turns");
  if (it == j.end() || !it->is_array()) throw ValidationError("field \"turns\" must be an array");
  std::vector<Turn> turns;
  for (const auto& t : *it) {
    if (!t.is_object()) throw ValidationError("turn must be an object");
    turns.push_back(Turn{parse_role(get_string(t, "role")), get_string(t, "text")});
  }
  return Dialogue(get_string(j, "id"), parse_lang(get_string(j, "lang")), std::move(turns),
                  get_scores(j));
}

template <>
MCQItem parse_record<MCQItem>(std::string_view line) {
  const json j = parse_object(line);
  MCQItem m;
  m.id = get_string(j, "id");
  m.stem = get_string(j, "stem");
  auto it = j.find("options");
  if (it == j.end() || !it->is_object()) throw ValidationError("field \"options\" must be an object");
  for (const auto& [k, v] : it->items()) {
    if (!v.is_string()) throw ValidationError("option " + k + " must be a string");
    m.options.emplace(k, v.get<std::string>());
  }
  m.gold = get_string(j, "gold");
  validate(m);
  return m;
}

template <>
PreferencePair parse_record<PreferencePair>(std::string_view line) {
  const json j = parse_object(line);
  PreferencePair p;
  p.id = get_string(j, "id");
  p.prompt = get_string(j, "prompt");
  p.chosen = get_string(j, "chosen");
  p.rejected = get_string(j, "rejected");
  p.kind = parse_pair_kind(get_string(j, "kind"));
  validate(p);
  return p;
}

std::string rejection_line(std::string_view stage, std::string_view reason, std::string_view record_json) {
  ordered_json j;
  j["stage"] = stage;
  j["reason"] = reason;
  j["record"] = ordered_json::parse(record_json);
  return j.dump();
}

std::string serialize(const Document& d) {
  ordered_json j;
  j["id"] = d.id;
  j["lang"] = to_string(d.lang);
  j["source"] = d.source;
  j["text"] = d.text;
  j["meta"] = ordered_json::object();
  for (const auto& [k, v] : d.meta) j["meta"][k] = v;
  j["scores"] = scores_json(d.scores);
  return j.dump();
}

std::string serialize(const Dialogue& d) {
  ordered_json j;
  j["id"] = d.id();
  j["lang"] = to_string(d.lang());
  j["turns"] = ordered_json::array();
  for (const auto& t : d.turns()) j["turns"].push_back({{"role", to_string(t.role)}, {"text", t.text}});
  j["scores"] = scores_json(d.scores());
  return j.dump();
}

std::string serialize(const MCQItem& m) {
  ordered_json j;
  j["id"] = m.id;
  j["stem"] = m.stem;
  j["options"] = ordered_json::object();
  for (const auto& [k, v] : m.options) j["options"][k] = v;
  j["gold"] = m.gold;
  return j.dump();
}

std::string serialize(const PreferencePair& p) {
  ordered_json j;
  j["id"] = p.id;
  j["prompt"] = p.prompt;
  j["chosen"] = p.chosen;
  j["rejected"] = p.rejected;
  j["kind"] = to_string(p.kind);
  return j.dump();
}

RecordWriter::RecordWriter(const std::filesystem::path& path)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
}

void RecordWriter::write_line(std::string_view line) {
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.put('\n');
  if (!out_) throw IoError("write failure in " + path_.string(), count_);
  ++count_;
}

void RecordWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write failure in " + path_.string(), count_);
  out_.close();
}

}  // namespace medcurate
