#include <doctest.h>

#include <deque>

#include "medcurate/errors.hpp"
#include "medcurate/preference.hpp"
#include "medcurate/providers.hpp"
#include "medcurate/templates.hpp"

using namespace medcurate;

namespace {

/// Returns queued replies in order and records every request.
class ScriptedJudge : public JudgeProvider {
 public:
  std::deque<std::string> replies;
  std::vector<std::pair<std::string, std::string>> requests;
  std::string identity() const override { return "scripted-judge"; }
  std::string complete(std::string_view system, std::string_view prompt) override {
    requests.emplace_back(system, prompt);
    if (replies.empty()) throw ProviderError("out of replies", false);
    auto r = replies.front();
    replies.pop_front();
    return r;
  }
};

MCQItem mcq(std::string id = "q1") {
  return {std::move(id), "Which drug lowers blood glucose?",
          {{"A", "Metformin"}, {"B", "Aspirin"}, {"C", "Warfarin"}, {"D", "Ibuprofen"}}, "A"};
}

}  // namespace

TEST_CASE("judge prefers the original response") {
  ScriptedJudge j;
  j.replies = {"regenerated answer", "Reasoning...\nResponse 1 is better than Response 2"};
  auto r = build_subjective_pair("p1", "What is a fever?", "original answer", j);
  REQUIRE(std::holds_alternative<PreferencePair>(r));
  const auto& p = std::get<PreferencePair>(r);
  CHECK(p.chosen == "original answer");
  CHECK(p.rejected == "regenerated answer");
  CHECK(p.kind == PairKind::subjective);
  REQUIRE(j.requests.size() == 2);
  CHECK(j.requests[0].first == doctor_system_prompt().text);
  CHECK(j.requests[0].second == "What is a fever?");
  CHECK(j.requests[1].second.find("[Response 1]\noriginal answer\n[End of Response 1]") != std::string::npos);
  CHECK(j.requests[1].second.find("[Response 2]\nregenerated answer\n[End of Response 2]") != std::string::npos);
}

TEST_CASE("judge prefers the regenerated response") {
  ScriptedJudge j;
  j.replies = {"regenerated answer", "**Response 1 is worse than Response 2.**"};
  auto r = build_subjective_pair("p1", "q", "original answer", j);
  REQUIRE(std::holds_alternative<PreferencePair>(r));
  CHECK(std::get<PreferencePair>(r).chosen == "regenerated answer");
}

TEST_CASE("no preference is invented") {
  ScriptedJudge equal;
  equal.replies = {"regen", "Response 1 is equal to Response 2"};
  CHECK(std::get<Skip>(build_subjective_pair("p", "q", "orig", equal)).reason == "equal");

  ScriptedJudge garbled;
  garbled.replies = {"regen", "I think the first one"};
  CHECK(std::get<Skip>(build_subjective_pair("p", "q", "orig", garbled)).reason.starts_with("unparseable_verdict"));

  ScriptedJudge down;
  CHECK(std::get<Skip>(build_subjective_pair("p", "q", "orig", down)).reason.starts_with("provider_error"));

  ScriptedJudge same;
  same.replies = {"orig", "Response 1 is better than Response 2"};
  CHECK(std::get<Skip>(build_subjective_pair("p", "q", "orig", same)).reason == "identical_responses");

  ScriptedJudge empty;
  empty.replies = {"   ", "Response 1 is better than Response 2"};
  CHECK(std::get<Skip>(build_subjective_pair("p", "q", "orig", empty)).reason.starts_with("provider_error"));

  CHECK_THROWS_AS(build_subjective_pair("p", "", "orig", same), ValidationError);
}

TEST_CASE("mock judge builds pairs end to end") {
  MockJudge j(MockJudge::Style::prefer_longer);
  auto r = build_subjective_pair("p", "I have a headache.", "Rest.", j);
  REQUIRE(std::holds_alternative<PreferencePair>(r));
  CHECK(std::get<PreferencePair>(r).rejected == "Rest.");
}

TEST_CASE("mcq rendering") {
  CHECK(render_option("B", "Aspirin") == "B. Aspirin");
  CHECK(render_mcq_prompt(mcq()) ==
        "Which drug lowers blood glucose?\nA. Metformin\nB. Aspirin\nC. Warfarin\nD. Ibuprofen");
}

TEST_CASE("objective pairs take the gold option against a wrong one") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto p = build_objective_pair(mcq(), rng);
    CHECK(p.chosen == "A. Metformin");
    CHECK(p.rejected != p.chosen);
    CHECK((p.rejected == "B. Aspirin" || p.rejected == "C. Warfarin" || p.rejected == "D. Ibuprofen"));
    CHECK(p.kind == PairKind::objective);
    CHECK(p.prompt == render_mcq_prompt(mcq()));
  }
  auto bad = mcq();
  bad.gold = "E";
  CHECK_THROWS_AS(build_objective_pair(bad, rng), ValidationError);
}

TEST_CASE("objective pairs are reproducible per item and seed") {
  std::vector<MCQItem> items;
  for (int i = 0; i < 50; ++i) items.push_back(mcq("q" + std::to_string(i)));
  const auto a = build_objective_pairs(items, 9);
  CHECK(a == build_objective_pairs(items, 9));
  CHECK(a != build_objective_pairs(items, 10));
  // dropping an item leaves the others unchanged
  std::vector<MCQItem> tail(items.begin() + 1, items.end());
  const auto b = build_objective_pairs(tail, 9);
  CHECK(std::vector<PreferencePair>(a.begin() + 1, a.end()) == b);
}

TEST_CASE("pair manifest stats") {
  std::vector<PreferencePair> pairs(3, PreferencePair{"p", "q", "a", "b", PairKind::subjective});
  pairs.push_back({"o", "q", "a", "b", PairKind::objective});
  const auto s = pair_manifest_stats(pairs);
  CHECK(s.subjective == 3);
  CHECK(s.objective == 1);
  CHECK(s.total == 4);
  CHECK(pair_manifest_stats(std::vector<PreferencePair>{}).total == 0);
}
