// medcurate: command-line front end for the curation toolkit.
//
// Every verb reads JSON Lines, writes JSON Lines and prints a JSON summary on
// stdout. Failures print {"error": {"type", "message"}} on stderr and exit 1.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "medcurate/digest.hpp"
#include "medcurate/errors.hpp"
#include "medcurate/eval.hpp"
#include "medcurate/jsonl.hpp"
#include "medcurate/mix.hpp"
#include "medcurate/pipeline.hpp"
#include "medcurate/preference.hpp"
#include "medcurate/random.hpp"
#include "medcurate/rules.hpp"
#include "medcurate/sft.hpp"
#include "medcurate/stats.hpp"
#include "provider_specs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace medcurate;
using cli::ProviderRole;

namespace {

struct Globals {
  std::string transcript_path;
  std::string transcript_mode = "record";
  std::size_t max_in_flight = 8;
  int retries = 3;
  cli::RemoteDefaults remote;
  bool strict = false;

  std::shared_ptr<Transcript> transcript;

  RetryPolicy retry() const { return RetryPolicy{retries, std::chrono::milliseconds(0)}; }

  void open_transcript() {
    if (!transcript_path.empty() && !transcript)
      transcript = std::make_shared<Transcript>(transcript_path, parse_transcript_mode(transcript_mode));
  }
  void close_transcript() {
    if (transcript && transcript->mode() == TranscriptMode::record) transcript->save();
  }

  ProviderRegistry registry(const std::string& spec, ProviderRole role) {
    open_transcript();
    json providers = {{"p", cli::provider_entry(spec, role, remote)}};
    ProviderRegistry r(providers, fs::current_path(), transcript);
    r.validate();
    return r;
  }
};

// Output files shared by the filtering verbs.
struct Outputs {
  std::string in;
  std::string out;
  std::string rejected;
  std::string quarantined;

  void add_to(CLI::App* app) {
    app->add_option("-i,--in", in, "Input JSONL")->required()->check(CLI::ExistingFile);
    app->add_option("-o,--out", out, "Kept records")->required();
    app->add_option("--rejected", rejected, "Rejected records, wrapped with their reason");
    app->add_option("--quarantined", quarantined, "Records a provider failed on");
  }
};

template <class Record>
std::vector<Record> load(const std::string& path, bool strict, ordered_json& summary) {
  auto all = read_records<Record>(path);
  summary["input"] = all.records.size() + all.errors.size();
  if (!all.errors.empty()) {
    summary["line_errors"] = ordered_json::array();
    for (const auto& e : all.errors) summary["line_errors"].push_back({{"line", e.line}, {"message", e.message}});
    if (strict)
      throw ValidationError(path + ":" + std::to_string(all.errors.front().line) + ": " + all.errors.front().message);
  }
  return std::move(all.records);
}

template <class Record>
void emit(const Partition<Record>& part, const Outputs& o, const std::string& stage, ordered_json& summary) {
  if (o.rejected == o.out || o.quarantined == o.out) throw ConfigError("rejection files must differ from --out");
  write_records(part.kept, o.out);
  if (!o.rejected.empty()) write_rejections(part.rejected, stage, o.rejected);
  if (!o.quarantined.empty()) write_rejections(part.quarantined, stage, o.quarantined);
  summary["kept"] = part.kept.size();
  summary["rejected"] = part.rejected.size();
  summary["quarantined"] = part.quarantined.size();
  summary["reasons"] = part.reason_counts();
  summary["out_sha256"] = sha256_file(o.out).hex();
}

void print(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<BenchmarkText> load_benchmarks(const std::vector<std::string>& specs) {
  std::vector<BenchmarkText> out;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--benchmark expects NAME=FILE, got \"" + spec + "\"");
    const std::string name = spec.substr(0, eq);
    std::ifstream in(spec.substr(eq + 1));
    if (!in) throw IoError("cannot open " + spec.substr(eq + 1));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) out.push_back({name, line});
    }
  }
  return out;
}

int fail(const char* type, const std::string& message) {
  ordered_json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Medical LLM data curation toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--transcript", g.transcript_path, "Provider transcript file (JSONL)");
  app.add_option("--transcript-mode", g.transcript_mode, "record or replay")
      ->check(CLI::IsMember({"record", "replay"}));
  app.add_option("--max-in-flight", g.max_in_flight, "Concurrent provider requests")->check(CLI::PositiveNumber);
  app.add_option("--retries", g.retries, "Attempts per provider call")->check(CLI::PositiveNumber);
  app.add_option("--api-key-env", g.remote.api_key_env, "Environment variable holding the API key");
  app.add_option("--model", g.remote.model, "Model name sent to remote providers");
  app.add_flag("--strict", g.strict, "Fail on malformed input lines instead of skipping them");

  // classify-gate
  Outputs cg_io;
  std::string cg_provider = "mock", cg_label = "medicine";
  auto* cg = app.add_subcommand("classify-gate", "Keep documents labeled with the target domain");
  cg_io.add_to(cg);
  cg->add_option("--provider", cg_provider, "Score provider spec");
  cg->add_option("--target", cg_label, "Label to keep");

  // filter-rules
  Outputs fr_io;
  std::string fr_rules;
  std::optional<std::size_t> fr_min_tokens;
  std::optional<double> fr_max_special;
  std::string fr_lexicon, fr_pii;
  auto* fr = app.add_subcommand("filter-rules", "Length, special-character, toxicity and PII rules");
  fr_io.add_to(fr);
  fr->add_option("--rules", fr_rules, "Rule set JSON")->check(CLI::ExistingFile);
  fr->add_option("--min-tokens", fr_min_tokens);
  fr->add_option("--max-special-ratio", fr_max_special);
  fr->add_option("--toxic-lexicon", fr_lexicon, "One term per line")->check(CLI::ExistingFile);
  fr->add_option("--pii-patterns", fr_pii, "Extra PII regexes, NAME<TAB>REGEX per line")->check(CLI::ExistingFile);

  // dedup
  Outputs dd_io;
  auto* dd = app.add_subcommand("dedup", "Drop exact duplicates after normalization");
  dd_io.add_to(dd);

  // decontaminate
  Outputs dc_io;
  std::vector<std::string> dc_bench;
  std::size_t dc_n = Decontaminator::kDefaultN;
  auto* dc = app.add_subcommand("decontaminate", "Drop documents sharing an n-gram with a benchmark");
  dc_io.add_to(dc);
  dc->add_option("--benchmark", dc_bench, "NAME=FILE, one benchmark text per line")->required();
  dc->add_option("--n", dc_n, "N-gram length in tokens");

  // quality-gate
  Outputs qg_io;
  std::string qg_provider = "mock";
  double qg_threshold = kDefaultQualityThreshold;
  auto* qg = app.add_subcommand("quality-gate", "Keep documents whose quality score clears the threshold");
  qg_io.add_to(qg);
  qg->add_option("--provider", qg_provider, "Score provider spec");
  qg->add_option("--threshold", qg_threshold);

  // select-sft
  Outputs ss_io;
  std::string ss_mode = "multi", ss_provider = "uniform:64", ss_scorer;
  MultiTurnOptions ss_opts;
  auto* ss = app.add_subcommand("select-sft", "Select SFT dialogues by Deita score and context relevance");
  ss_io.add_to(ss);
  ss->add_option("--mode", ss_mode)->check(CLI::IsMember({"single", "multi"}));
  ss->add_option("--provider", ss_provider, "Log-probability provider spec (multi mode)");
  ss->add_option("--scorer", ss_scorer, "Deita scorer spec; without it, scores must already be on the records");
  ss->add_option("--deita-threshold", ss_opts.deita_threshold);
  ss->add_option("--cr-low", ss_opts.cr_low);
  ss->add_option("--cr-high", ss_opts.cr_high);

  // mix-plan
  int mp_stage = 1;
  std::uint64_t mp_total = 0;
  std::vector<std::string> mp_sources;
  auto* mp = app.add_subcommand("mix-plan", "Split a token budget across sources");
  mp->add_option("--stage", mp_stage)->check(CLI::IsMember({1, 2}));
  mp->add_option("--total-tokens", mp_total)->required();
  mp->add_option("--source", mp_sources, "NAME:AVAILABLE_TOKENS:FRACTION")->required();

  // build-dpo
  std::string bd_mcq, bd_subjective, bd_out, bd_skipped, bd_judge = "mock";
  std::uint64_t bd_seed = 0;
  auto* bd = app.add_subcommand("build-dpo", "Build preference pairs");
  bd->add_option("--mcq", bd_mcq, "Multiple-choice items (JSONL)")->check(CLI::ExistingFile);
  bd->add_option("--subjective", bd_subjective, "Dialogues whose first exchange is re-answered and judged")
      ->check(CLI::ExistingFile);
  bd->add_option("-o,--out", bd_out, "Preference pairs")->required();
  bd->add_option("--skipped", bd_skipped, "Subjective prompts that produced no pair");
  bd->add_option("--judge", bd_judge, "Judge provider spec");
  bd->add_option("--seed", bd_seed);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "LLM-as-judge evaluation");
  ev->require_subcommand(1);
  std::string ep_cand, ep_ref, ep_judge = "mock", ep_audit;
  std::size_t ep_sample = 0;
  std::uint64_t ep_seed = 0;
  auto* ep = ev->add_subcommand("pairwise", "Swap-consistent win/tie/loss against reference answers");
  ep->add_option("--candidates", ep_cand)->required()->check(CLI::ExistingFile);
  ep->add_option("--references", ep_ref)->required()->check(CLI::ExistingFile);
  ep->add_option("--judge", ep_judge, "Judge provider spec");
  ep->add_option("--sample", ep_sample, "Evaluate a seeded random subset of this size (0 = all)");
  ep->add_option("--seed", ep_seed);
  ep->add_option("--audit", ep_audit, "Per-item verdicts (JSONL)");
  std::string er_dialogues, er_judge = "mock", er_audit;
  auto* er = ev->add_subcommand("rubric", "Per-round rubric scores for multi-turn answers");
  er->add_option("--dialogues", er_dialogues)->required()->check(CLI::ExistingFile);
  er->add_option("--judge", er_judge, "Judge provider spec");
  er->add_option("--audit", er_audit, "Per-round scores (JSONL)");

  // stats
  std::string st_in, st_schema = "document";
  auto* st = app.add_subcommand("stats", "Counts and ratios by source category and language");
  st->add_option("-i,--in", st_in)->required()->check(CLI::ExistingFile);
  st->add_option("--schema", st_schema)->check(CLI::IsMember({"document", "dialogue"}));

  // run
  std::string rn_config, rn_in, rn_out;
  auto* rn = app.add_subcommand("run", "Run a configured pipeline");
  rn->add_option("-c,--config", rn_config)->required()->check(CLI::ExistingFile);
  rn->add_option("-i,--in", rn_in)->required()->check(CLI::ExistingFile);
  rn->add_option("-o,--out-dir", rn_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage_error", e.what());
  }

  try {
    ordered_json summary;
    const GateOptions gate{g.retry(), g.max_in_flight};

    if (*cg) {
      auto docs = load<Document>(cg_io.in, g.strict, summary);
      auto reg = g.registry(cg_provider, ProviderRole::score);
      emit(gate_all_by_domain(std::move(docs), *reg.score("p"), cg_label, gate), cg_io, "classify-gate", summary);
    } else if (*fr) {
      RuleSet rules;
      if (!fr_rules.empty()) {
        std::ifstream in(fr_rules);
        rules = RuleSet::from_json(json::parse(in), fs::path(fr_rules).parent_path());
      }
      if (fr_min_tokens) rules.min_tokens = *fr_min_tokens;
      if (fr_max_special) rules.max_special_char_ratio = *fr_max_special;
      if (!fr_lexicon.empty()) {
        auto extra = load_lexicon(fr_lexicon);
        rules.toxic_lexicon.insert(rules.toxic_lexicon.end(), extra.begin(), extra.end());
      }
      if (!fr_pii.empty()) {
        auto extra = load_pii_patterns(fr_pii);
        rules.pii_patterns.insert(rules.pii_patterns.end(), extra.begin(), extra.end());
      }
      rules.validate();
      auto docs = load<Document>(fr_io.in, g.strict, summary);
      emit(filter_rules(std::move(docs), rules), fr_io, "filter-rules", summary);
    } else if (*dd) {
      auto docs = load<Document>(dd_io.in, g.strict, summary);
      emit(dedup(std::move(docs)), dd_io, "dedup", summary);
    } else if (*dc) {
      const auto bench = load_benchmarks(dc_bench);
      const Decontaminator index(bench, dc_n);
      auto docs = load<Document>(dc_io.in, g.strict, summary);
      auto result = decontaminate(std::move(docs), index);
      emit(result.partition, dc_io, "decontaminate", summary);
      summary["benchmark_hits"] = result.hits;
    } else if (*qg) {
      auto docs = load<Document>(qg_io.in, g.strict, summary);
      auto reg = g.registry(qg_provider, ProviderRole::score);
      emit(gate_all_by_quality(std::move(docs), *reg.score("p"), qg_threshold, gate), qg_io, "quality-gate",
           summary);
    } else if (*ss) {
      auto dialogues = load<Dialogue>(ss_io.in, g.strict, summary);
      if (!ss_scorer.empty()) {
        auto reg = g.registry(ss_scorer, ProviderRole::deita);
        auto scorer = reg.deita("p");
        for (auto& d : dialogues) d = annotate_deita(std::move(d), *scorer, g.retry());
      }
      Partition<Dialogue> part;
      if (ss_mode == "single") {
        part = select_single_turn(std::move(dialogues), ss_opts.deita_threshold);
      } else {
        ss_opts.max_in_flight = g.max_in_flight;
        ss_opts.retry = g.retry();
        auto reg = g.registry(ss_provider, ProviderRole::logprob);
        part = select_multi_turn(std::move(dialogues), *reg.logprob("p"), ss_opts);
      }
      emit(part, ss_io, "select-sft", summary);
    } else if (*mp) {
      std::vector<SourceBudget> sources;
      for (const auto& s : mp_sources) sources.push_back(parse_source_budget(s));
      print(plan_mix(mp_stage == 1 ? Stage::stage1 : Stage::stage2, mp_total, sources).to_json());
      return 0;
    } else if (*bd) {
      if (bd_mcq.empty() && bd_subjective.empty()) throw ConfigError("build-dpo needs --mcq and/or --subjective");
      std::vector<PreferencePair> pairs;
      std::vector<std::string> skipped;
      if (!bd_subjective.empty()) {
        ordered_json sub;
        auto dialogues = load<Dialogue>(bd_subjective, g.strict, sub);
        auto reg = g.registry(bd_judge, ProviderRole::judge);
        auto judge = reg.judge("p");
        std::map<std::string, std::size_t> skips;
        for (const auto& d : dialogues) {
          auto r = build_subjective_pair(d.id(), d.turns()[0].text, d.turns()[1].text, *judge, g.retry());
          if (auto* p = std::get_if<PreferencePair>(&r)) {
            pairs.push_back(std::move(*p));
          } else {
            const auto& reason = std::get<Skip>(r).reason;
            ++skips[reason.substr(0, reason.find(':'))];
            ordered_json line;
            line["id"] = d.id();
            line["reason"] = reason;
            skipped.push_back(line.dump());
          }
        }
        summary["subjective_input"] = sub["input"];
        summary["subjective_skipped"] = skips;
      }
      if (!bd_mcq.empty()) {
        ordered_json obj;
        auto items = load<MCQItem>(bd_mcq, g.strict, obj);
        auto objective = build_objective_pairs(items, bd_seed);
        pairs.insert(pairs.end(), objective.begin(), objective.end());
        summary["objective_input"] = obj["input"];
      }
      write_records(pairs, bd_out);
      if (!bd_skipped.empty()) {
        RecordWriter w(bd_skipped);
        for (const auto& s : skipped) w.write_line(s);
        w.close();
      }
      const auto stats = pair_manifest_stats(pairs);
      summary["pairs"] = {{"subjective", stats.subjective}, {"objective", stats.objective}, {"total", stats.total}};
      summary["out_sha256"] = sha256_file(bd_out).hex();
    } else if (*ep) {
      const auto cands = read_answers(ep_cand);
      const auto refs = read_answers(ep_ref);
      auto items = join_answers(cands, refs);
      if (ep_sample > 0 && ep_sample < items.size()) {
        std::vector<PairwiseItem> subset;
        for (auto i : sample_indices(items.size(), ep_sample, ep_seed)) subset.push_back(items[i]);
        items = std::move(subset);
      }
      auto reg = g.registry(ep_judge, ProviderRole::judge);
      const auto run = evaluate_pairwise(items, *reg.judge("p"), EvalOptions{g.max_in_flight, g.retry()});
      if (!ep_audit.empty()) {
        RecordWriter w(ep_audit);
        for (const auto& a : run.audit) w.write_line(audit_json(a).dump());
        w.close();
      }
      summary = run.report.to_json();
    } else if (*er) {
      const auto dialogues = read_rubric_dialogues(er_dialogues);
      auto reg = g.registry(er_judge, ProviderRole::judge);
      const auto run = evaluate_rubric(dialogues, *reg.judge("p"), EvalOptions{g.max_in_flight, g.retry()});
      if (!er_audit.empty()) {
        RecordWriter w(er_audit);
        for (const auto& a : run.audit) w.write_line(audit_json(a).dump());
        w.close();
      }
      summary = run.report.to_json();
    } else if (*st) {
      ordered_json ignored;
      if (st_schema == "document") {
        const auto docs = load<Document>(st_in, g.strict, ignored);
        summary = distribution(std::span<const Document>(docs)).to_json();
      } else {
        const auto dialogues = load<Dialogue>(st_in, g.strict, ignored);
        summary = distribution(std::span<const Dialogue>(dialogues)).to_json();
      }
    } else if (*rn) {
      auto config = PipelineConfig::load(rn_config);
      if (!g.transcript_path.empty())
        config.transcript = TranscriptSpec{g.transcript_path, parse_transcript_mode(g.transcript_mode)};
      const auto report = run_pipeline(config, rn_in, rn_out);
      print(report.to_json());
      if (!report.ok) return fail("stage_error", report.failed_stage + ": " + report.error);
      return 0;
    }

    g.close_transcript();
    print(summary);
    return 0;
  } catch (const Error& e) {
    return fail(e.kind(), e.what());
  } catch (const json::exception& e) {
    return fail("parse_error", e.what());
  } catch (const std::exception& e) {
    return fail("error", e.what());
  }
}
