// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "cr_oracle.hpp"
#include "fuzz.hpp"
#include "medcurate/digest.hpp"
#include "medcurate/errors.hpp"
#include "medcurate/eval.hpp"
#include "medcurate/jsonl.hpp"
#include "medcurate/logprob.hpp"
#include "medcurate/mix.hpp"
#include "medcurate/pipeline.hpp"
#include "medcurate/preference.hpp"
#include "medcurate/providers.hpp"
#include "medcurate/quality.hpp"
#include "medcurate/rules.hpp"
#include "medcurate/sft.hpp"
#include "medcurate/stats.hpp"

using namespace medcurate;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MEDCURATE_DATA_DIR;

struct Result {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

// ---------------------------------------------------------------------------

Result cr_oracle_equivalence() {
  Result r;
  const auto start = std::chrono::steady_clock::now();
  const std::u32string alphabet = U"abcdefgh医生患者发热咳嗽";  // 16 symbols
  Rng rng(101);
  std::size_t dialogues = 0, turns = 0;
  double worst = 0.0;
  for (std::size_t order : {1, 2, 3}) {
    std::vector<std::string> training;
    for (int i = 0; i < 40; ++i) {
      std::string s;
      const std::size_t len = rng.below(60) + 10;
      for (std::size_t k = 0; k < len; ++k) s += text::encode_utf8(alphabet[rng.below(alphabet.size())]);
      training.push_back(s);
    }
    auto lm = CharNGramLM::train(training, order);
    const oracle::NGramOracle ref(training, order);
    UniformLM uniform(alphabet.size());
    for (int i = 0; i < 40; ++i, ++dialogues) {
      const auto d = oracle::random_dialogue(rng, alphabet, 3, "d" + std::to_string(dialogues));
      for (std::size_t t = 1; t < d.turns().size(); t += 2, ++turns) {
        const double c = conditioned_information_score(lm, d, t);
        const double dd = direct_information_score(lm, d, t);
        const auto cr = context_relevance(lm, d, t);
        const double oc = oracle::conditioned(ref, d, t), od = oracle::direct(ref, d, t);
        const double errs[] = {std::abs(c - oc), std::abs(dd - od), std::abs(cr.ratio - oc / od)};
        for (double e : errs) worst = std::max(worst, e);
        if (!(errs[0] < 1e-9 && errs[1] < 1e-9 && errs[2] < 1e-9))
          r.fail("mismatch on " + d.id() + " turn " + std::to_string(t));
        if (context_relevance(uniform, d, t).ratio != 1.0) r.fail("uniform ratio != 1 on " + d.id());
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 10.0) r.fail("took " + std::to_string(secs) + " s");
  if (r.pass) {
    std::ostringstream s;
    s << dialogues << " dialogues, " << turns << " assistant turns, max |err| " << worst << ", uniform ratio 1.0, "
      << secs << " s";
    r.detail = s.str();
  }
  return r;
}

Result score_fidelity() {
  Result r;
  Rng rng(202);
  for (int i = 0; i < 10000; ++i) {
    const double c = 1.0 + 5.0 * rng.uniform(), q = 1.0 + 5.0 * rng.uniform();
    const double expected = c * q;
    const double got = combine_scores(c, q);
    if (std::memcmp(&got, &expected, sizeof got) != 0) r.fail("combine_scores differs from c*q");
    std::vector<double> per(rng.below(6) + 1);
    for (auto& x : per) x = 36.0 * rng.uniform();
    double sum = 0.0;
    for (double x : per) sum += x;
    if (dialogue_deita_score(per) != sum / static_cast<double>(per.size())) r.fail("dialogue score is not the mean");
  }
  std::size_t grid = 0;
  for (int a = 0; a <= 12; ++a)
    for (int b = 0; b <= 12; ++b)
      for (double gap : {0.5, 1.0, 2.0, 2.5}) {
        const double s1 = a * 0.5, s2 = b * 0.5;
        ++grid;
        if (double_score_consistent(s1, s2, gap) != (std::abs(s1 - s2) < gap))
          r.fail("consistency mismatch at " + std::to_string(s1) + "," + std::to_string(s2));
      }
  if (double_score_consistent(3, 5, 2)) r.fail("(3, 5, gap 2) judged consistent");
  if (r.pass) r.detail = "10000 products bit-exact, 10000 means exact, " + std::to_string(grid) + " grid points, (3,5,2) -> false";
  return r;
}

Result filter_algebra() {
  Result r;
  auto docs = fuzz::random_corpus(303, 1000);
  Rng rng(304);
  std::vector<BenchmarkText> bench;
  for (int i = 0; i < 24; ++i) {
    std::string t;
    while (text::normalized_tokens(t).size() < 13) t = fuzz::random_text(rng, 25);
    bench.push_back({i % 3 == 0 ? "medqa" : i % 3 == 1 ? "cmb" : "cmexam", t});
  }
  for (int i = 0; i < 60; ++i) docs[static_cast<std::size_t>(i) * 16].text += " " + bench[i % bench.size()].text;

  const auto rules = fuzz::fuzz_rules();
  std::vector<Rule> order(kDefaultRuleOrder.begin(), kDefaultRuleOrder.end());
  std::sort(order.begin(), order.end());
  std::vector<bool> reference;
  for (const auto& d : docs) reference.push_back(apply_rules(d, rules, order).keep);
  int perms = 1;
  while (std::next_permutation(order.begin(), order.end())) {
    ++perms;
    for (std::size_t i = 0; i < docs.size(); ++i)
      if (apply_rules(docs[i], rules, order).keep != reference[i]) r.fail("kept set depends on rule order");
  }
  const auto kept_count = std::count(reference.begin(), reference.end(), true);

  const auto once = dedup(docs);
  const auto twice = dedup(once.kept);
  if (!(twice.kept == once.kept) || !twice.rejected.empty()) r.fail("dedup not idempotent");
  std::set<Digest> hashes;
  for (const auto& d : once.kept)
    if (!hashes.insert(content_hash(d.text)).second) r.fail("duplicate hash among kept documents");

  const Decontaminator index(bench);
  std::size_t agree = 0, contaminated = 0;
  for (const auto& d : docs) {
    const auto expected = fuzz::brute_force_matches(d.text, bench, Decontaminator::kDefaultN, text::normalized_tokens);
    contaminated += !expected.empty();
    if (index.matches(d.text) == expected) ++agree;
  }
  if (agree != docs.size()) r.fail("decontamination disagrees with oracle on " + std::to_string(docs.size() - agree) + " docs");
  if (r.pass) {
    std::ostringstream s;
    s << docs.size() << " docs: kept " << kept_count << " under all " << perms << " rule orders; dedup removed "
      << once.rejected.size() << ", idempotent; decontamination " << agree << "/" << docs.size()
      << " agree with oracle (" << contaminated << " contaminated)";
    r.detail = s.str();
  }
  return r;
}

MCQItem random_mcq(Rng& rng, std::size_t i) {
  static const std::string labels[] = {"A", "B", "C", "D", "E"};
  MCQItem m;
  m.id = "mcq-" + std::to_string(i);
  m.stem = "Question " + std::to_string(i) + ": " + fuzz::random_text(rng, 12);
  const std::size_t k = rng.below(4) + 2;
  std::vector<std::string> pool(labels, labels + 5);
  for (std::size_t j = 0; j < k; ++j) {
    const auto pick = rng.below(pool.size());
    m.options[pool[pick]] = "option " + std::to_string(j) + " " + fuzz::random_text(rng, 5);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  auto it = m.options.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(rng.below(m.options.size())));
  m.gold = it->first;
  return m;
}

Result dpo_objective() {
  Result r;
  Rng rng(404);
  std::vector<MCQItem> items;
  for (std::size_t i = 0; i < 10000; ++i) items.push_back(random_mcq(rng, i));
  const auto pairs = build_objective_pairs(items, 7);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& m = items[i];
    const auto& p = pairs[i];
    if (p.chosen != render_option(m.gold, m.options.at(m.gold))) r.fail("chosen is not the gold rendering");
    bool wrong = false;
    for (const auto& [label, text] : m.options)
      if (label != m.gold && p.rejected == render_option(label, text)) wrong = true;
    if (!wrong) r.fail("rejected is not a wrong-option rendering");
    if (p.prompt != render_mcq_prompt(m) || p.kind != PairKind::objective) r.fail("prompt or kind wrong");
  }
  if (build_objective_pairs(items, 7) != pairs) r.fail("same seed gave different pairs");

  // Manifest with 9,019 subjective and 3,708 objective pairs.
  MockJudge judge(MockJudge::Style::prefer_longer);
  std::vector<PreferencePair> manifest;
  for (std::size_t i = 0; i < 9019; ++i) {
    auto res = build_subjective_pair("s" + std::to_string(i), "Symptom question " + std::to_string(i) + "?", "Rest.",
                                     judge);
    if (auto* p = std::get_if<PreferencePair>(&res)) manifest.push_back(std::move(*p));
  }
  auto objective = build_objective_pairs(std::span<const MCQItem>(items).first(3708), 11);
  manifest.insert(manifest.end(), objective.begin(), objective.end());
  const auto path = fs::temp_directory_path() / "medcurate_acceptance_pairs.jsonl";
  write_records(manifest, path);
  const auto loaded = read_records<PreferencePair>(path);
  const auto stats = pair_manifest_stats(loaded.records);
  if (stats.subjective != 9019 || stats.objective != 3708 || stats.total != 12727)
    r.fail("manifest stats " + std::to_string(stats.subjective) + "+" + std::to_string(stats.objective) + "=" +
           std::to_string(stats.total));
  if (r.pass)
    r.detail = "10000 MCQs gold/wrong-option exact, seed-reproducible; manifest 9019 + 3708 = " +
               std::to_string(stats.total);
  return r;
}

Result judge_soundness() {
  Result r;
  Rng rng(505);
  std::vector<PairwiseItem> items;
  std::vector<Outcome> truth;
  for (int i = 0; i < 1000; ++i) {
    PairwiseItem it{"i" + std::to_string(i), "q" + std::to_string(i), fuzz::random_text(rng, 20),
                    fuzz::random_text(rng, 20)};
    if (i % 10 == 0) it.reference = it.candidate;
    const auto lc = text::code_point_count(it.candidate), lr = text::code_point_count(it.reference);
    truth.push_back(lc > lr ? Outcome::win : lc < lr ? Outcome::loss : Outcome::tie);
    items.push_back(std::move(it));
  }
  MockJudge biased(MockJudge::Style::position_biased);
  const auto b = evaluate_pairwise(items, biased);
  if (b.report.ties != items.size()) r.fail("position-biased judge produced a non-tie");

  MockJudge keyed(MockJudge::Style::prefer_longer);
  const auto k = evaluate_pairwise(items, keyed);
  std::size_t match = 0;
  for (std::size_t i = 0; i < items.size(); ++i)
    if (k.audit[i].outcome && k.audit[i].outcome->outcome == truth[i]) ++match;
  if (match != items.size()) r.fail("content-keyed judge matched " + std::to_string(match) + "/1000");
  for (const auto* rep : {&b.report, &k.report})
    if (std::abs(rep->win_rate + rep->tie_rate + rep->loss_rate - 1.0) > 1e-12) r.fail("rates do not sum to 1");

  try {
    if (!(parse_rubric(R"({"fluency":3,"relevance":3,"completeness":3,"proficiency":3})") == RubricScores{3, 3, 3, 3}))
      r.fail("example rubric parsed wrongly");
  } catch (const ParseError&) {
    r.fail("example rubric rejected");
  }
  for (const char* bad : {R"({"fluency":6,"relevance":3,"completeness":3,"proficiency":3})",
                          R"({"fluency":3,"relevance":0,"completeness":3,"proficiency":3})",
                          R"({"fluency":3,"relevance":3,"completeness":-1,"proficiency":3})"}) {
    try {
      parse_rubric(bad);
      r.fail(std::string("accepted out-of-range rubric ") + bad);
    } catch (const ParseError&) {
    }
  }
  if (r.pass) {
    std::ostringstream s;
    s << "position-biased: " << b.report.ties << "/1000 ties; content-keyed: " << match
      << "/1000 match ground truth (W/T/L " << k.report.wins << "/" << k.report.ties << "/" << k.report.losses
      << "); rates sum to 1; rubric example accepted, out-of-range rejected";
    r.detail = s.str();
  }
  return r;
}

Result mix_exactness() {
  Result r;
  Rng rng(606);
  std::size_t instances = 0;
  auto check = [&](std::uint64_t total) {
    const std::size_t k = rng.below(8) + 1;
    std::vector<double> w(k);
    for (auto& x : w) x = rng.below(4) == 0 ? 1.0 : rng.uniform() + 1e-6;  // some equal weights to force ties
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<SourceBudget> s;
    for (std::size_t i = 0; i < k; ++i) s.push_back({"src" + std::to_string(i), total, w[i] / z});
    const auto plan = plan_mix(rng.below(2) ? Stage::stage1 : Stage::stage2, total, s);
    std::uint64_t sum = 0;
    for (const auto& a : plan.allocations) {
      sum += a.tokens;
      const long double exact = static_cast<long double>(total) * a.target_fraction;
      if (std::fabs(static_cast<long double>(a.tokens) - exact) >= 1.0L + 1e-6L * exact)
        r.fail("allocation strays more than one token from its share");
    }
    if (sum != total) r.fail("allocations sum to " + std::to_string(sum) + ", not " + std::to_string(total));
    ++instances;
  };
  for (int i = 0; i < 1000; ++i) check(rng.below(1'000'000'000'000ULL) + 1);
  for (int i = 0; i < 50; ++i) {
    check(60'000'000'000ULL);
    check(20'000'000'000ULL);
  }
  if (r.pass) r.detail = std::to_string(instances) + " instances (incl. 60B and 20B totals) sum exactly";
  return r;
}

Result pipeline_determinism() {
  Result r;
  auto config = PipelineConfig::load(kData / "pipeline.json");
  const auto transcript = fs::temp_directory_path() / "medcurate_acceptance_transcript.jsonl";
  fs::remove(transcript);
  const auto input = kData / "synthetic_corpus.jsonl";

  auto run = [&](const std::string& name, TranscriptMode mode) {
    const auto dir = fs::temp_directory_path() / ("medcurate_acceptance_" + name);
    fs::remove_all(dir);
    config.transcript = TranscriptSpec{transcript, mode};
    const auto report = run_pipeline(config, input, dir);
    std::map<std::string, std::string> digests;
    for (const auto& e : fs::directory_iterator(dir)) digests[e.path().filename().string()] = sha256_file(e.path()).hex();
    return std::make_pair(report, digests);
  };
  const auto [rec, rec_d] = run("record", TranscriptMode::record);
  const auto [rep1, rep1_d] = run("replay1", TranscriptMode::replay);
  const auto [rep2, rep2_d] = run("replay2", TranscriptMode::replay);
  if (!rec.ok || !rep1.ok || !rep2.ok) r.fail("a run failed");
  if (rep1_d != rep2_d) r.fail("replayed runs differ");
  if (rec_d != rep1_d) r.fail("replay differs from the recorded run");

  const auto manifest = read_records<Document>(kData / "sft_manifest.jsonl").records;
  const auto stats = distribution(std::span<const Document>(manifest));
  const double zh = stats.lang_ratio.count("zh") ? stats.lang_ratio.at("zh") : -1;
  const double en = stats.lang_ratio.count("en") ? stats.lang_ratio.at("en") : -1;
  if (zh != 0.86 || en != 0.14) r.fail("language ratio " + std::to_string(zh) + ":" + std::to_string(en));
  if (r.pass) {
    std::ostringstream s;
    s << rep1_d.size() << " output files byte-identical across record + 2 replays (final "
      << rep1.final_digest.substr(0, 12) << ", " << rep1.stages.back().kept << "/200 kept); manifest zh:en = " << zh
      << ":" << en;
    r.detail = s.str();
  }
  return r;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Result()>> criteria[] = {
      {"AC1 context-relevance oracle equivalence", cr_oracle_equivalence},
      {"AC2 score and consistency-rule fidelity", score_fidelity},
      {"AC3 filter algebra", filter_algebra},
      {"AC4 objective DPO pairs and manifest count", dpo_objective},
      {"AC5 judge harness soundness", judge_soundness},
      {"AC6 mix plan exactness", mix_exactness},
      {"AC7 pipeline determinism and language ratio", pipeline_determinism},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Result res;
    try {
      res = fn();
    } catch (const std::exception& e) {
      res.fail(std::string("exception: ") + e.what());
    }
    std::printf("%s %s: %s\n", res.pass ? "PASS" : "FAIL", name, res.detail.c_str());
    failures += !res.pass;
  }
  return failures == 0 ? 0 : 1;
}
