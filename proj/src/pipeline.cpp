#include "medcurate/pipeline.hpp"

#include <fstream>
#include <set>
#include <variant>

#include "medcurate/digest.hpp"
#include "medcurate/errors.hpp"
#include "medcurate/http.hpp"
#include "medcurate/providers.hpp"
#include "medcurate/rules.hpp"

namespace medcurate {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

const std::set<std::string> kScoreKinds = {"mock-score", "remote-score"};
const std::set<std::string> kDeitaKinds = {"mock-deita", "remote-score"};
const std::set<std::string> kLogProbKinds = {"uniform-lm", "ngram-lm", "remote-logprob"};
const std::set<std::string> kJudgeKinds = {"mock-judge", "remote-judge"};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::vector<std::string> read_text_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

Schema op_schema(const std::string& op) {
  if (op == "select-sft") return Schema::dialogue;
  return Schema::document;
}

const std::set<std::string> kOps = {"filter-rules", "dedup", "decontaminate", "classify-gate", "quality-gate",
                                    "select-sft"};

}  // namespace

// ---------------------------------------------------------------------------
// ProviderRegistry
// ---------------------------------------------------------------------------

ProviderRegistry::ProviderRegistry(json providers, std::filesystem::path base_dir,
                                   std::shared_ptr<Transcript> transcript)
    : providers_(std::move(providers)), base_dir_(std::move(base_dir)), transcript_(std::move(transcript)) {
  if (providers_.is_null()) providers_ = json::object();
  if (!providers_.is_object()) throw ConfigError("\"providers\" must be an object");
}

const json& ProviderRegistry::entry(const std::string& name) const {
  auto it = providers_.find(name);
  if (it == providers_.end()) throw ConfigError("undeclared provider \"" + name + "\"");
  return *it;
}

std::string ProviderRegistry::kind(const std::string& name) const {
  const auto& e = entry(name);
  if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string())
    throw ConfigError("provider \"" + name + "\" needs a string \"kind\"");
  return e["kind"].get<std::string>();
}

void ProviderRegistry::validate() const {
  for (const auto& [name, e] : providers_.items()) {
    const auto k = kind(name);
    if (!kScoreKinds.contains(k) && !kDeitaKinds.contains(k) && !kLogProbKinds.contains(k) && !kJudgeKinds.contains(k))
      throw ConfigError("provider \"" + name + "\" has unknown kind \"" + k + "\"");
    if (k.starts_with("remote-") && !e.contains("base_url"))
      throw ConfigError("provider \"" + name + "\" needs base_url");
    if (k == "ngram-lm" && !e.contains("train_file") && !e.contains("train_text"))
      throw ConfigError("provider \"" + name + "\" needs train_file or train_text");
  }
}

bool ProviderRegistry::provides_score(const std::string& name) const { return has(name) && kScoreKinds.contains(kind(name)); }
bool ProviderRegistry::provides_logprob(const std::string& name) const {
  return has(name) && kLogProbKinds.contains(kind(name));
}
bool ProviderRegistry::provides_judge(const std::string& name) const { return has(name) && kJudgeKinds.contains(kind(name)); }
bool ProviderRegistry::provides_deita(const std::string& name) const { return has(name) && kDeitaKinds.contains(kind(name)); }

std::shared_ptr<ScoreProvider> ProviderRegistry::score(const std::string& name) {
  if (auto it = scores_.find(name); it != scores_.end()) return it->second;
  if (!provides_score(name)) throw ConfigError("provider \"" + name + "\" is not a score provider");
  const auto& e = entry(name);
  std::shared_ptr<ScoreProvider> p;
  if (kind(name) == "mock-score")
    p = std::make_shared<MockScoreProvider>();
  else
    p = std::make_shared<RemoteScoreProvider>(
        RemoteConfig::from_json(e), e.value("taxonomy", std::vector<std::string>{"medicine", "general"}));
  if (transcript_) p = std::make_shared<TranscriptScoreProvider>(p, transcript_);
  return scores_[name] = p;
}

std::shared_ptr<DeitaScorer> ProviderRegistry::deita(const std::string& name) {
  if (auto it = deitas_.find(name); it != deitas_.end()) return it->second;
  if (!provides_deita(name)) throw ConfigError("provider \"" + name + "\" is not a Deita scorer");
  const auto& e = entry(name);
  std::shared_ptr<DeitaScorer> p;
  if (kind(name) == "mock-deita")
    p = std::make_shared<MockDeitaScorer>();
  else
    p = std::make_shared<RemoteScoreProvider>(
        RemoteConfig::from_json(e), e.value("taxonomy", std::vector<std::string>{"medicine", "general"}));
  if (transcript_) p = std::make_shared<TranscriptDeitaScorer>(p, transcript_);
  return deitas_[name] = p;
}

std::shared_ptr<LogProbProvider> ProviderRegistry::logprob(const std::string& name) {
  if (auto it = logprobs_.find(name); it != logprobs_.end()) return it->second;
  if (!provides_logprob(name)) throw ConfigError("provider \"" + name + "\" is not a log-probability provider");
  const auto& e = entry(name);
  const auto k = kind(name);
  std::shared_ptr<LogProbProvider> p;
  if (k == "uniform-lm") {
    p = std::make_shared<UniformLM>(e.value("vocab_size", std::size_t{4}));
  } else if (k == "ngram-lm") {
    std::vector<std::string> texts;
    if (e.contains("train_text")) texts.push_back(e["train_text"].get<std::string>());
    if (e.contains("train_file")) {
      auto lines = read_text_lines(resolve(base_dir_, e["train_file"].get<std::string>()));
      texts.insert(texts.end(), lines.begin(), lines.end());
    }
    p = std::make_shared<CharNGramLM>(CharNGramLM::train(texts, e.value("order", std::size_t{2})));
  } else {
    p = std::make_shared<RemoteLogProbProvider>(RemoteConfig::from_json(e), e.value("log_base", 0.0));
  }
  if (transcript_) p = std::make_shared<TranscriptLogProbProvider>(p, transcript_);
  return logprobs_[name] = p;
}

std::shared_ptr<JudgeProvider> ProviderRegistry::judge(const std::string& name) {
  if (auto it = judges_.find(name); it != judges_.end()) return it->second;
  if (!provides_judge(name)) throw ConfigError("provider \"" + name + "\" is not a judge");
  const auto& e = entry(name);
  std::shared_ptr<JudgeProvider> p;
  if (kind(name) == "mock-judge") {
    const auto style = e.value("style", std::string("prefer_longer"));
    if (style == "position_biased")
      p = std::make_shared<MockJudge>(MockJudge::Style::position_biased);
    else if (style == "prefer_longer")
      p = std::make_shared<MockJudge>(MockJudge::Style::prefer_longer);
    else
      throw ConfigError("unknown mock judge style \"" + style + "\"");
  } else {
    p = std::make_shared<RemoteJudgeProvider>(RemoteConfig::from_json(e));
  }
  if (transcript_) p = std::make_shared<TranscriptJudgeProvider>(p, transcript_);
  return judges_[name] = p;
}

// ---------------------------------------------------------------------------
// PipelineConfig
// ---------------------------------------------------------------------------

PipelineConfig PipelineConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  PipelineConfig c;
  c.raw = j;
  c.base_dir = base_dir;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    c.input_schema = parse_schema(j.value("input_schema", std::string("document")));
    c.max_in_flight = j.value("max_in_flight", std::size_t{8});
    if (j.contains("retry")) {
      c.retry.max_attempts = j["retry"].value("max_attempts", 3);
      c.retry.backoff = std::chrono::milliseconds(j["retry"].value("backoff_ms", 0));
    }
    if (j.contains("transcript")) {
      const auto& t = j["transcript"];
      c.transcript = TranscriptSpec{resolve(base_dir, t.at("path").get<std::string>()),
                                    parse_transcript_mode(t.value("mode", std::string("record")))};
    }
    c.providers = j.value("providers", json::object());
    for (const auto& s : j.at("stages")) {
      StageSpec spec;
      spec.name = s.at("name").get<std::string>();
      spec.op = s.at("op").get<std::string>();
      spec.provider = s.value("provider", std::string{});
      spec.scorer = s.value("scorer", std::string{});
      spec.params = s.value("params", json::object());
      c.stages.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void PipelineConfig::validate() const {
  ProviderRegistry registry(providers, base_dir);
  registry.validate();
  if (stages.empty()) throw ConfigError("pipeline has no stages");
  if (retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
  std::set<std::string> names;
  for (const auto& s : stages) {
    if (s.name.empty()) throw ConfigError("stage name is empty");
    if (!names.insert(s.name).second) throw ConfigError("duplicate stage name \"" + s.name + "\"");
    if (!kOps.contains(s.op)) throw ConfigError("stage \"" + s.name + "\" has unknown op \"" + s.op + "\"");
    if (op_schema(s.op) != input_schema)
      throw ConfigError("stage \"" + s.name + "\" (" + s.op + ") does not accept " +
                        std::string(to_string(input_schema)) + " records");
    auto need = [&](const std::string& name, bool ok, const char* what) {
      if (name.empty()) throw ConfigError("stage \"" + s.name + "\" needs a " + what);
      if (!registry.has(name)) throw ConfigError("stage \"" + s.name + "\" references undeclared provider \"" + name + "\"");
      if (!ok) throw ConfigError("provider \"" + name + "\" cannot serve as " + what + " for stage \"" + s.name + "\"");
    };
    if (s.op == "classify-gate" || s.op == "quality-gate") need(s.provider, registry.provides_score(s.provider), "score provider");
    if (s.op == "select-sft") {
      const auto mode = s.params.value("mode", std::string("multi"));
      if (mode != "single" && mode != "multi") throw ConfigError("select-sft mode must be single or multi");
      if (mode == "multi") need(s.provider, registry.provides_logprob(s.provider), "log-probability provider");
      if (!s.scorer.empty()) need(s.scorer, registry.provides_deita(s.scorer), "Deita scorer");
    }
    if (s.op == "classify-gate" && !s.params.contains("target_label"))
      throw ConfigError("stage \"" + s.name + "\" needs params.target_label");
    if (s.op == "decontaminate" && !s.params.contains("benchmarks"))
      throw ConfigError("stage \"" + s.name + "\" needs params.benchmarks");
  }
}

std::string PipelineConfig::hash() const { return sha256(raw.dump()).hex(); }

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

ordered_json RunReport::to_json() const {
  ordered_json j;
  j["status"] = ok ? "ok" : "failed";
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["input"] = {{"file", input_file}, {"sha256", input_digest}, {"records", input_records},
                {"line_errors", input_errors.size()}};
  j["input"]["errors"] = ordered_json::array();
  for (const auto& e : input_errors) j["input"]["errors"].push_back({{"line", e.line}, {"message", e.message}});
  j["stages"] = ordered_json::array();
  for (const auto& s : stages) {
    ordered_json st;
    st["name"] = s.name;
    st["op"] = s.op;
    st["input"] = s.input;
    st["kept"] = s.kept;
    st["rejected"] = s.rejected;
    st["quarantined"] = s.quarantined;
    st["reasons"] = s.reasons;
    st["outputs"] = ordered_json::object();
    for (const auto& [k, v] : s.outputs) st["outputs"][k] = {{"file", v.first}, {"sha256", v.second}};
    if (!s.extra.empty()) st["extra"] = s.extra;
    j["stages"].push_back(std::move(st));
  }
  if (!ok) {
    j["failed_stage"] = failed_stage;
    j["error"] = error;
  }
  j["final"] = {{"file", final_file}, {"sha256", final_digest}};
  return j;
}

namespace {

using Records = std::variant<std::vector<Document>, std::vector<Dialogue>>;

template <class Record>
std::pair<std::string, std::string> write_kept(const std::vector<Record>& records, const std::filesystem::path& dir,
                                               const std::string& file) {
  write_records(records, dir / file);
  return {file, sha256_file(dir / file).hex()};
}

template <class Record>
std::pair<std::string, std::string> write_rejected(const std::vector<Rejection<Record>>& rejections,
                                                   const std::string& stage, const std::filesystem::path& dir,
                                                   const std::string& file) {
  write_rejections(rejections, stage, dir / file);
  return {file, sha256_file(dir / file).hex()};
}

std::vector<BenchmarkText> load_benchmarks(const json& spec, const std::filesystem::path& base) {
  std::vector<BenchmarkText> out;
  for (const auto& [name, file] : spec.items())
    for (auto& line : read_text_lines(resolve(base, file.get<std::string>()))) out.push_back({name, std::move(line)});
  return out;
}

struct StageContext {
  const PipelineConfig& config;
  ProviderRegistry& registry;
};

template <class Record>
Partition<Record> run_stage(const StageSpec&, StageContext&, std::vector<Record>, StageReport&);

template <>
Partition<Document> run_stage(const StageSpec& s, StageContext& ctx, std::vector<Document> docs, StageReport& report) {
  const GateOptions gate{ctx.config.retry, ctx.config.max_in_flight};
  if (s.op == "filter-rules") return filter_rules(std::move(docs), RuleSet::from_json(s.params, ctx.config.base_dir));
  if (s.op == "dedup") return dedup(std::move(docs));
  if (s.op == "decontaminate") {
    const auto benchmarks = load_benchmarks(s.params.at("benchmarks"), ctx.config.base_dir);
    const Decontaminator index(benchmarks, s.params.value("n", Decontaminator::kDefaultN));
    auto result = decontaminate(std::move(docs), index);
    report.extra["benchmark_hits"] = result.hits;
    return std::move(result.partition);
  }
  if (s.op == "classify-gate")
    return gate_all_by_domain(std::move(docs), *ctx.registry.score(s.provider),
                              s.params.at("target_label").get<std::string>(), gate);
  if (s.op == "quality-gate")
    return gate_all_by_quality(std::move(docs), *ctx.registry.score(s.provider),
                               s.params.value("threshold", kDefaultQualityThreshold), gate);
  throw ConfigError("op " + s.op + " does not accept documents");
}

template <>
Partition<Dialogue> run_stage(const StageSpec& s, StageContext& ctx, std::vector<Dialogue> dialogues,
                              StageReport&) {
  if (s.op != "select-sft") throw ConfigError("op " + s.op + " does not accept dialogues");
  if (!s.scorer.empty()) {
    auto scorer = ctx.registry.deita(s.scorer);
    for (auto& d : dialogues) d = annotate_deita(std::move(d), *scorer, ctx.config.retry);
  }
  const auto mode = s.params.value("mode", std::string("multi"));
  const double threshold = s.params.value("deita_threshold", 0.0);
  if (mode == "single") return select_single_turn(std::move(dialogues), threshold);
  MultiTurnOptions o;
  o.deita_threshold = threshold;
  o.cr_low = s.params.value("cr_low", o.cr_low);
  o.cr_high = s.params.value("cr_high", o.cr_high);
  o.max_in_flight = ctx.config.max_in_flight;
  o.retry = ctx.config.retry;
  return select_multi_turn(std::move(dialogues), *ctx.registry.logprob(s.provider), o);
}

template <class Record>
void run_all(const PipelineConfig& config, const std::filesystem::path& input, const std::filesystem::path& out_dir,
             ProviderRegistry& registry, RunReport& report) {
  auto all = read_records<Record>(input);
  report.input_records = all.records.size();
  report.input_errors = std::move(all.errors);
  std::vector<Record> current = std::move(all.records);

  StageContext ctx{config, registry};
  for (std::size_t i = 0; i < config.stages.size(); ++i) {
    const auto& spec = config.stages[i];
    StageReport sr;
    sr.name = spec.name;
    sr.op = spec.op;
    sr.input = current.size();
    Partition<Record> part;
    try {
      part = run_stage(spec, ctx, std::move(current), sr);
    } catch (const std::exception& e) {
      report.ok = false;
      report.failed_stage = spec.name;
      report.error = e.what();
      return;
    }
    char prefix[8];
    std::snprintf(prefix, sizeof prefix, "%02zu_", i + 1);
    const std::string stem = prefix + spec.name;
    sr.kept = part.kept.size();
    sr.rejected = part.rejected.size();
    sr.quarantined = part.quarantined.size();
    sr.reasons = part.reason_counts();
    sr.outputs["kept"] = write_kept(part.kept, out_dir, stem + ".kept.jsonl");
    sr.outputs["rejected"] = write_rejected(part.rejected, spec.name, out_dir, stem + ".rejected.jsonl");
    sr.outputs["quarantined"] = write_rejected(part.quarantined, spec.name, out_dir, stem + ".quarantined.jsonl");
    report.stages.push_back(std::move(sr));
    current = std::move(part.kept);
  }
  auto [file, digest] = write_kept(current, out_dir, "final.jsonl");
  report.final_file = file;
  report.final_digest = digest;
}

}  // namespace

RunReport run_pipeline(const PipelineConfig& config, const std::filesystem::path& input,
                       const std::filesystem::path& out_dir) {
  config.validate();
  if (!std::filesystem::exists(input)) throw IoError("input " + input.string() + " does not exist");
  std::filesystem::create_directories(out_dir);

  std::shared_ptr<Transcript> transcript;
  if (config.transcript) transcript = std::make_shared<Transcript>(config.transcript->path, config.transcript->mode);
  ProviderRegistry registry(config.providers, config.base_dir, transcript);

  RunReport report;
  report.config_hash = config.hash();
  report.seed = config.seed;
  report.input_file = input.filename().string();
  report.input_digest = sha256_file(input).hex();

  if (config.input_schema == Schema::document)
    run_all<Document>(config, input, out_dir, registry, report);
  else
    run_all<Dialogue>(config, input, out_dir, registry, report);

  if (transcript && transcript->mode() == TranscriptMode::record) transcript->save();

  std::ofstream out(out_dir / "report.json", std::ios::binary | std::ios::trunc);
  out << report.to_json().dump(2) << '\n';
  if (!out) throw IoError("cannot write " + (out_dir / "report.json").string());
  return report;
}

}  // namespace medcurate
