#include <doctest.h>

#include <deque>
#include <filesystem>
#include <fstream>

#include "medcurate/errors.hpp"
#include "medcurate/eval.hpp"
#include "medcurate/providers.hpp"

using namespace medcurate;

namespace {

class ScriptedJudge : public JudgeProvider {
 public:
  std::deque<std::string> replies;
  std::vector<std::string> prompts;
  std::string identity() const override { return "scripted"; }
  std::string complete(std::string_view, std::string_view prompt) override {
    prompts.emplace_back(prompt);
    if (replies.empty()) throw ProviderError("out of replies", false);
    auto r = replies.front();
    replies.pop_front();
    return r;
  }
};

const std::string kBetter = "Assistant 1 is better than Assistant 2";
const std::string kWorse = "Assistant 1 is worse than Assistant 2";
const std::string kEqual = "Assistant 1 is equal to Assistant 2";

}  // namespace

TEST_CASE("verdict parsing") {
  CHECK(parse_verdict("analysis\n" + kBetter) == Verdict::first);
  CHECK(parse_verdict(kWorse + "\n\n") == Verdict::second);
  CHECK(parse_verdict("\"" + kEqual + ".\"") == Verdict::equal);
  CHECK(parse_verdict("**assistant 1 is BETTER than assistant 2**") == Verdict::first);
  CHECK_THROWS_AS(parse_verdict(kBetter + "\nThanks!"), ParseError);
  CHECK_THROWS_AS(parse_verdict("Assistant 1 is better"), ParseError);
  CHECK_THROWS_AS(parse_verdict(""), ParseError);
}

TEST_CASE("swap-consistent outcome table") {
  using enum Verdict;
  CHECK(swap_consistent_outcome(first, second).outcome == Outcome::win);
  CHECK(swap_consistent_outcome(second, first).outcome == Outcome::loss);
  for (auto f : {first, second, equal})
    for (auto b : {first, second, equal}) {
      if ((f == first && b == second) || (f == second && b == first)) continue;
      CHECK(swap_consistent_outcome(f, b).outcome == Outcome::tie);
    }
}

TEST_CASE("single-turn judging places the candidate first, then second") {
  ScriptedJudge j;
  j.replies = {kBetter, kWorse};
  const auto o = judge_single_turn("Q?", "CAND", "REF", j);
  CHECK(o.outcome == Outcome::win);
  REQUIRE(j.prompts.size() == 2);
  CHECK(j.prompts[0].find("[Assistant 1]\nCAND\n") != std::string::npos);
  CHECK(j.prompts[1].find("[Assistant 1]\nREF\n") != std::string::npos);
  CHECK(j.prompts[0].find("[User]\nQ?\n[End of User]") != std::string::npos);
}

TEST_CASE("position-biased judge always ties") {
  MockJudge j(MockJudge::Style::position_biased);
  CHECK(judge_single_turn("q", "short", "a much longer reference", j).outcome == Outcome::tie);
  CHECK(judge_single_turn("q", "a much longer candidate", "short", j).outcome == Outcome::tie);
}

TEST_CASE("content-keyed judge follows content") {
  MockJudge j(MockJudge::Style::prefer_longer);
  CHECK(judge_single_turn("q", "a much longer candidate", "short", j).outcome == Outcome::win);
  CHECK(judge_single_turn("q", "short", "a much longer reference", j).outcome == Outcome::loss);
  CHECK(judge_single_turn("q", "same", "four", j).outcome == Outcome::tie);
}

TEST_CASE("pairwise aggregate") {
  std::vector<PairwiseOutcome> o{{Outcome::win}, {Outcome::win}, {Outcome::tie}, {Outcome::loss}};
  const auto r = aggregate(o, 3);
  CHECK(r.wins == 2);
  CHECK(r.win_rate == 0.5);
  CHECK(r.tie_rate == 0.25);
  CHECK(r.loss_rate == 0.25);
  CHECK(r.errors == 3);
  CHECK_THROWS_AS(aggregate(std::span<const PairwiseOutcome>{}), ValidationError);
}

TEST_CASE("unparseable replies are counted as errors") {
  ScriptedJudge j;
  j.replies = {kBetter, kWorse, "no idea", kEqual};
  std::vector<PairwiseItem> items{{"1", "q", "c", "r"}, {"2", "q", "c", "r"}};
  const auto run = evaluate_pairwise(items, j, EvalOptions{1, {}});
  REQUIRE(run.audit.size() == 2);
  CHECK(run.audit[0].outcome->outcome == Outcome::win);
  CHECK_FALSE(run.audit[1].outcome);
  CHECK(run.audit[1].error.starts_with("parse_error"));
  CHECK(run.report.wins == 1);
  CHECK(run.report.errors == 1);
  CHECK(run.report.win_rate == 1.0);
}

TEST_CASE("rubric parsing") {
  CHECK(parse_rubric(R"({"fluency":3,"relevance":3,"completeness":3,"proficiency":3})") ==
        RubricScores{3, 3, 3, 3});
  CHECK(parse_rubric("Scores:\n```json\n{\"fluency\": 5, \"relevance\": 4, \"completeness\": 2.0, \"proficiency\": 1}\n```") ==
        RubricScores{5, 4, 2, 1});
  CHECK(parse_rubric(R"({"note": "uses {braces}", "fluency":1,"relevance":1,"completeness":1,"proficiency":1})") ==
        RubricScores{1, 1, 1, 1});
  CHECK_THROWS_AS(parse_rubric(R"({"fluency":6,"relevance":3,"completeness":3,"proficiency":3})"), ParseError);
  CHECK_THROWS_AS(parse_rubric(R"({"fluency":0,"relevance":3,"completeness":3,"proficiency":3})"), ParseError);
  CHECK_THROWS_AS(parse_rubric(R"({"fluency":2.5,"relevance":3,"completeness":3,"proficiency":3})"), ParseError);
  CHECK_THROWS_AS(parse_rubric(R"({"fluency":"3","relevance":3,"completeness":3,"proficiency":3})"), ParseError);
  CHECK_THROWS_AS(parse_rubric(R"({"fluency":3,"relevance":3,"completeness":3})"), ParseError);
  CHECK_THROWS_AS(parse_rubric(R"({"fluency":3,"relevance":3,"completeness":3,"proficiency":3} {"fluency":3})"),
                  ParseError);
  CHECK_THROWS_AS(parse_rubric("no json here"), ParseError);
  CHECK_THROWS_AS(parse_rubric("{not json}"), ParseError);
}

TEST_CASE("rubric aggregate averages rounds, then rounds") {
  std::vector<RoundScore> s{{1, {2, 2, 2, 2}}, {1, {4, 4, 4, 4}}, {2, {5, 1, 1, 1}}};
  const auto r = aggregate(s);
  REQUIRE(r.per_round.size() == 2);
  CHECK(r.per_round[0].first == 1);
  CHECK(r.per_round[0].second.fluency == 3.0);
  CHECK(r.per_round[1].second.fluency == 5.0);
  CHECK(r.overall.fluency == 4.0);
  CHECK(r.overall.relevance == 2.0);
  CHECK(r.rounds_scored == 3);
}

TEST_CASE("rubric run with the mock judge") {
  MockJudge j(MockJudge::Style::prefer_longer);
  std::vector<RubricDialogue> d{{"d1", {{"", "q1", "reference answer", "an answer that is fairly long indeed"},
                                        {"q1 ...", "q2", "ref", "ok"}}}};
  const auto run = evaluate_rubric(d, j);
  REQUIRE(run.audit.size() == 2);
  CHECK(run.audit[0].round == 1);
  CHECK(run.audit[1].round == 2);
  CHECK(run.report.rounds_scored == 2);
  CHECK(run.report.errors == 0);
}

TEST_CASE("answer files join by id") {
  const auto dir = std::filesystem::temp_directory_path();
  std::ofstream(dir / "medcurate_cand.jsonl") << R"({"id":"1","question":"q1","answer":"c1"})" << "\n"
                                              << R"({"id":"2","question":"q2","answer":"c2"})" << "\n";
  std::ofstream(dir / "medcurate_ref.jsonl") << R"({"id":"2","question":"q2","answer":"r2"})" << "\n"
                                             << R"({"id":"1","question":"q1","answer":"r1"})" << "\n";
  const auto c = read_answers(dir / "medcurate_cand.jsonl");
  const auto r = read_answers(dir / "medcurate_ref.jsonl");
  const auto items = join_answers(c, r);
  REQUIRE(items.size() == 2);
  CHECK(items[0].candidate == "c1");
  CHECK(items[0].reference == "r1");
  std::vector<AnswerRecord> orphan{{"3", "q", "a"}};
  CHECK_THROWS_AS(join_answers(orphan, r), ValidationError);
}
