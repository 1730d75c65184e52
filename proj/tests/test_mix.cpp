#include <doctest.h>

#include <numeric>

#include "medcurate/errors.hpp"
#include "medcurate/mix.hpp"
#include "medcurate/random.hpp"

using namespace medcurate;

namespace {

std::uint64_t sum(const MixPlan& p) {
  std::uint64_t s = 0;
  for (const auto& a : p.allocations) s += a.tokens;
  return s;
}

}  // namespace

TEST_CASE("thirds of one hundred") {
  const std::vector<SourceBudget> s{{"a", 1000, 1.0 / 3}, {"b", 1000, 1.0 / 3}, {"c", 1000, 1.0 / 3}};
  const auto p = plan_mix(Stage::stage1, 100, s);
  REQUIRE(p.allocations.size() == 3);
  CHECK(p.allocations[0].tokens == 34);
  CHECK(p.allocations[1].tokens == 33);
  CHECK(p.allocations[2].tokens == 33);
  CHECK(p.warnings.empty());
}

TEST_CASE("ties are broken by source name, not input order") {
  const std::vector<SourceBudget> s{{"z", 10, 0.5}, {"m", 10, 0.25}, {"a", 10, 0.25}};
  const auto p = plan_mix(Stage::stage2, 3, s);
  std::map<std::string, std::uint64_t> got;
  for (const auto& a : p.allocations) got[a.source] = a.tokens;
  // exact shares 1.5, 0.75, 0.75: floors 1,0,0, one leftover goes to the largest remainder
  CHECK(got["z"] == 1);
  CHECK(got["a"] + got["m"] == 2);
  CHECK(got["a"] == 1);
  CHECK(got["m"] == 1);
}

TEST_CASE("upsampling warns with the epoch count") {
  const std::vector<SourceBudget> s{{"books", 10, 0.5}, {"web", 1000, 0.5}};
  const auto p = plan_mix(Stage::stage1, 100, s);
  CHECK(p.allocations[0].epochs == doctest::Approx(5.0));
  REQUIRE(p.warnings.size() == 1);
  CHECK(p.warnings[0].find("books") != std::string::npos);
}

TEST_CASE("invalid plans") {
  CHECK_THROWS_AS(plan_mix(Stage::stage1, 0, std::vector<SourceBudget>{{"a", 1, 1.0}}), ValidationError);
  CHECK_THROWS_AS(plan_mix(Stage::stage1, 10, std::vector<SourceBudget>{}), ValidationError);
  CHECK_THROWS_AS(plan_mix(Stage::stage1, 10, std::vector<SourceBudget>{{"a", 1, 0.5}}), ValidationError);
  CHECK_THROWS_AS(plan_mix(Stage::stage1, 10, std::vector<SourceBudget>{{"a", 1, 1.5}, {"b", 1, -0.5}}),
                  ValidationError);
  CHECK_THROWS_AS(plan_mix(Stage::stage1, 10, std::vector<SourceBudget>{{"a", 1, 0.5}, {"a", 1, 0.5}}),
                  ValidationError);
  CHECK_THROWS_AS(plan_mix(Stage::stage1, 10, std::vector<SourceBudget>{{"a", 0, 1.0}}), ValidationError);
}

TEST_CASE("source spec parsing") {
  const auto s = parse_source_budget("web:1000000:0.25");
  CHECK(s.name == "web");
  CHECK(s.available_tokens == 1000000);
  CHECK(s.target_fraction == 0.25);
  CHECK_THROWS_AS(parse_source_budget("web:1000"), ValidationError);
  CHECK_THROWS_AS(parse_source_budget("web:x:0.5"), ValidationError);
  CHECK_THROWS_AS(parse_source_budget(":10:0.5"), ValidationError);
}

TEST_CASE("large budgets sum exactly") {
  Rng rng(3);
  for (std::uint64_t total : {60'000'000'000ULL, 20'000'000'000ULL, 7ULL, 1ULL}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t k = rng.below(6) + 1;
      std::vector<double> w(k);
      for (auto& x : w) x = rng.uniform() + 1e-3;
      const double z = std::accumulate(w.begin(), w.end(), 0.0);
      std::vector<SourceBudget> s;
      for (std::size_t i = 0; i < k; ++i) s.push_back({"s" + std::to_string(i), total, w[i] / z});
      REQUIRE(sum(plan_mix(Stage::stage1, total, s)) == total);
    }
  }
}

TEST_CASE("plan json") {
  const auto p = plan_mix(Stage::stage2, 10, std::vector<SourceBudget>{{"a", 100, 1.0}});
  const auto j = p.to_json();
  CHECK(j["stage"] == 2);
  CHECK(j["total_tokens"] == 10);
  CHECK(j["allocations"][0]["tokens"] == 10);
}
