#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "fuzz.hpp"
#include "medcurate/digest.hpp"
#include "medcurate/errors.hpp"
#include "medcurate/rules.hpp"
#include "medcurate/text.hpp"

using namespace medcurate;

namespace {

Document doc(std::string id, std::string text) { return {std::move(id), Lang::en, "t", std::move(text), {}, {}}; }

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += "word" + std::to_string(i) + " ";
  return s;
}

}  // namespace

TEST_CASE("token count and special characters") {
  CHECK(token_count("The patient, aged 54, was discharged.") == 6);
  CHECK(token_count("患者发热") == 4);
  CHECK(special_char_ratio("") == 0.0);
  CHECK(special_char_ratio("abc, def.") == 0.0);
  CHECK(special_char_ratio("ab##") == doctest::Approx(0.5));
  CHECK(special_char_ratio("医生：你好。") == 0.0);
}

TEST_CASE("length rule at the boundary") {
  RuleSet r;
  CHECK(apply_rules(doc("a", words(32)), r).keep);
  CHECK(apply_rules(doc("a", words(31)), r) == FilterDecision::reject("min_tokens"));
}

TEST_CASE("pii patterns") {
  RuleSet r;
  r.min_tokens = 1;
  CHECK(apply_rules(doc("a", "Call 138-0000-0000 for results " + words(10)), r) == FilterDecision::reject("pii"));
  CHECK(apply_rules(doc("a", "电话13800000000"), r) == FilterDecision::reject("pii"));
  CHECK(apply_rules(doc("a", "mail jo.smith@example.com now"), r) == FilterDecision::reject("pii"));
  CHECK(apply_rules(doc("a", "phone (415) 555-0132"), r) == FilterDecision::reject("pii"));
  CHECK(apply_rules(doc("a", "身份证 11010519491231002X"), r) == FilterDecision::reject("pii"));
  CHECK(apply_rules(doc("a", "dose 5 mg twice daily for 10 days"), r).keep);
  CHECK(apply_rules(doc("a", "reference 2138000000001 is an order number"), r).keep);
}

TEST_CASE("toxic lexicon matches case-insensitively") {
  RuleSet r;
  r.min_tokens = 1;
  r.toxic_lexicon = {"Idiot"};
  CHECK(apply_rules(doc("a", "what an IDIOT"), r) == FilterDecision::reject("toxic"));
  CHECK(apply_rules(doc("a", "what a doctor"), r).keep);
}

TEST_CASE("rule order decides the reason but not the verdict") {
  RuleSet r;
  r.toxic_lexicon = {"idiot"};
  const auto d = doc("a", "idiot 138-0000-0000");
  const Rule a[] = {Rule::toxic, Rule::pii, Rule::length, Rule::special};
  const Rule b[] = {Rule::pii, Rule::length, Rule::special, Rule::toxic};
  CHECK(apply_rules(d, r, a).reason == "toxic");
  CHECK(apply_rules(d, r, b).reason == "pii");
}

TEST_CASE("kept set is invariant under every rule permutation") {
  const auto docs = fuzz::random_corpus(11, 300, 30);
  const auto rules = fuzz::fuzz_rules();
  std::vector<Rule> order(kDefaultRuleOrder.begin(), kDefaultRuleOrder.end());
  std::sort(order.begin(), order.end());
  std::vector<bool> reference;
  for (const auto& d : docs) reference.push_back(apply_rules(d, rules, order).keep);
  CHECK(std::count(reference.begin(), reference.end(), true) > 0);
  CHECK(std::count(reference.begin(), reference.end(), false) > 0);
  while (std::next_permutation(order.begin(), order.end()))
    for (std::size_t i = 0; i < docs.size(); ++i) REQUIRE(apply_rules(docs[i], rules, order).keep == reference[i]);
}

TEST_CASE("rule set validation and loading") {
  RuleSet r;
  r.max_special_char_ratio = 1.5;
  CHECK_THROWS_AS(r.validate(), ValidationError);
  CHECK_THROWS_AS(RuleSet::from_json({{"min_tokens", 0}}), ValidationError);
  CHECK_THROWS_AS(PiiPattern("bad", "("), ValidationError);

  const auto dir = std::filesystem::temp_directory_path();
  std::ofstream(dir / "medcurate_lex.txt") << "# comment\nfoo\n\nBar\n";
  std::ofstream(dir / "medcurate_pii.txt") << "# comment\nticket\tTKT-[0-9]{4}\nMRN[0-9]{6}\n";
  const auto loaded = RuleSet::from_json(
      {{"toxic_lexicon_file", "medcurate_lex.txt"}, {"pii_patterns_file", "medcurate_pii.txt"}, {"default_pii", false}},
      dir);
  CHECK(loaded.toxic_lexicon == std::vector<std::string>{"foo", "Bar"});
  REQUIRE(loaded.pii_patterns.size() == 2);
  CHECK(loaded.pii_patterns[0].name == "ticket");
  CHECK_FALSE(rule_passes(Rule::pii, "see TKT-1234", loaded));
  CHECK_FALSE(rule_passes(Rule::pii, "MRN123456", loaded));
  CHECK(rule_passes(Rule::pii, "138-0000-0000", loaded));
}

TEST_CASE("dedup keeps first occurrences and is idempotent") {
  std::vector<Document> docs{doc("1", "Alpha  beta"), doc("2", "alpha beta"), doc("3", " Alpha beta\n"),
                             doc("4", "gamma")};
  auto once = dedup(docs);
  REQUIRE(once.kept.size() == 3);
  CHECK(once.kept[0].id == "1");
  CHECK(once.kept[1].id == "2");
  CHECK(once.kept[2].id == "4");
  REQUIRE(once.rejected.size() == 1);
  CHECK(once.rejected[0].record.id == "3");
  CHECK(once.rejected[0].reason == "duplicate");
  auto twice = dedup(once.kept);
  CHECK(twice.kept == once.kept);
  CHECK(twice.rejected.empty());
}

TEST_CASE("dedup on a fuzzed corpus") {
  const auto docs = fuzz::random_corpus(5, 500);
  const auto p = dedup(docs);
  CHECK(p.total() == docs.size());
  CHECK_FALSE(p.rejected.empty());
  std::set<Digest> hashes;
  for (const auto& d : p.kept) CHECK(hashes.insert(content_hash(d.text)).second);
  for (const auto& r : p.rejected) CHECK(hashes.contains(content_hash(r.record.text)));
}

TEST_CASE("decontamination with a 13-gram overlap") {
  const std::vector<BenchmarkText> bench{
      {"medqa", "A 45 year old man presents with chest pain radiating to the left arm for two hours"},
      {"cmb", "患者女性三十岁因发热咳嗽三天就诊体温三十九度"}};
  const Decontaminator index(bench);
  CHECK(index.matches("Intro. a 45 YEAR old man presents with chest pain radiating to the left arm, then").size() ==
        1);
  CHECK(index.matches("a 45 year old man presents with chest pain radiating to the").empty());
  CHECK(index.matches("病例：患者女性三十岁因发热咳嗽三天就诊。") == std::vector<std::string>{"cmb"});
  CHECK(index.matches("unrelated text").empty());

  auto r = decontaminate({doc("1", "a 45 year old man presents with chest pain radiating to the left arm"),
                          doc("2", "clean text")},
                         index);
  REQUIRE(r.partition.rejected.size() == 1);
  CHECK(r.partition.rejected[0].reason == "contaminated:medqa");
  CHECK(r.hits.at("medqa") == 1);
  CHECK_THROWS_AS(Decontaminator(bench, 4), ValidationError);
}

TEST_CASE("decontamination agrees with a brute-force oracle") {
  Rng rng(99);
  std::vector<BenchmarkText> bench;
  for (int i = 0; i < 30; ++i) bench.push_back({i % 2 ? "b1" : "b2", fuzz::random_text(rng, 20)});
  auto docs = fuzz::random_corpus(7, 400, 30);
  for (int i = 0; i < 40; ++i) docs[i * 7].text += " " + bench[i % bench.size()].text;
  for (std::size_t n : {5, 8, 13}) {
    const Decontaminator index(bench, n);
    std::size_t contaminated = 0;
    for (const auto& d : docs) {
      const auto expected = fuzz::brute_force_matches(d.text, bench, n, text::normalized_tokens);
      contaminated += !expected.empty();
      REQUIRE(index.matches(d.text) == expected);
    }
    CHECK(contaminated > 0);
  }
}
