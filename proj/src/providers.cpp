#include "medcurate/providers.hpp"

#include <algorithm>
#include <set>

#include "medcurate/errors.hpp"
#include "medcurate/text.hpp"

namespace medcurate {
namespace {

constexpr std::string_view kMedicalKeywords[] = {
    "patient", "diagnos", "symptom", "treatment", "disease", "clinical", "doctor", "medicine", "medical",
    "therapy", "hospital", "drug", "dose", "surgery", "infection", "diabetes", "hypertension", "blood",
    "患者", "诊断", "症状", "治疗", "疾病", "临床", "医生", "药", "医院", "手术", "感染", "糖尿病", "高血压", "血"};

std::size_t slot_length(std::string_view prompt, std::string_view name) {
  const std::string open = "[" + std::string(name) + "]\n";
  const std::string close = "\n[End of " + std::string(name) + "]";
  return text::code_point_count(extract_between(prompt, open, close));
}

int bucket(std::size_t n, std::size_t per_point) {
  return static_cast<int>(std::clamp<std::size_t>(1 + n / per_point, 1, 5));
}

}  // namespace

std::string MockScoreProvider::classify(std::string_view t) {
  const std::string folded = text::case_fold(t);
  for (auto k : kMedicalKeywords)
    if (folded.find(k) != std::string::npos) return "medicine";
  return "general";
}

double MockScoreProvider::quality(std::string_view t) {
  const auto tokens = text::normalized_tokens(t);
  if (tokens.empty()) return 0.0;
  const std::set<std::string> distinct(tokens.begin(), tokens.end());
  const double n = static_cast<double>(tokens.size());
  return 6.0 * (static_cast<double>(distinct.size()) / n) * std::min(1.0, n / 64.0);
}

double MockDeitaScorer::complexity(std::string_view instruction) {
  return 1.0 + std::min(5.0, static_cast<double>(text::word_tokens(instruction).size()) / 10.0);
}

double MockDeitaScorer::quality(std::string_view, std::string_view response) {
  return 1.0 + std::min(5.0, static_cast<double>(text::word_tokens(response).size()) / 20.0);
}

std::string extract_between(std::string_view text, std::string_view open, std::string_view close) {
  const auto b = text.find(open);
  if (b == std::string_view::npos) return {};
  const auto start = b + open.size();
  const auto e = text.find(close, start);
  if (e == std::string_view::npos) return {};
  return std::string(text.substr(start, e - start));
}

std::string MockJudge::identity() const {
  return style_ == Style::position_biased ? "mock-judge:position" : "mock-judge:longer";
}

std::string MockJudge::complete(std::string_view, std::string_view prompt) {
  if (prompt.find("[ answer ]") != std::string_view::npos) {
    const auto answer = text::code_point_count(extract_between(prompt, "[ answer ]\n", "\n[ end of answer ]"));
    const auto solution = text::code_point_count(extract_between(prompt, "[ solution ]\n", "\n[ end of solution ]"));
    const int f = bucket(answer, 20);
    const int c = answer >= solution ? 5 : bucket(answer * 5, std::max<std::size_t>(solution, 1));
    return "{\"fluency\": " + std::to_string(f) + ", \"relevance\": " + std::to_string(f) +
           ", \"completeness\": " + std::to_string(c) + ", \"proficiency\": " + std::to_string(f) + "}";
  }
  std::string a, b;
  if (prompt.find("[Assistant 1]") != std::string_view::npos) {
    a = "Assistant 1";
    b = "Assistant 2";
  } else if (prompt.find("[Response 1]") != std::string_view::npos) {
    a = "Response 1";
    b = "Response 2";
  } else {
    return "Based on the description, " + std::string(prompt) + " Please see a doctor if symptoms persist.";
  }
  std::string relation = "better than";
  if (style_ == Style::prefer_longer) {
    const auto l1 = slot_length(prompt, a), l2 = slot_length(prompt, b);
    relation = l1 > l2 ? "better than" : l1 < l2 ? "worse than" : "equal to";
  }
  return "Both answers were compared.\n" + a + " is " + relation + " " + b;
}

RemoteScoreProvider::RemoteScoreProvider(RemoteConfig config, std::vector<std::string> taxonomy)
    : config_(std::move(config)), taxonomy_(std::move(taxonomy)), limiter_(config_.max_in_flight) {
  if (config_.path.empty()) config_.path = "/score";
  if (taxonomy_.empty()) throw ConfigError("remote score provider needs a taxonomy");
}

std::string RemoteScoreProvider::identity() const {
  return "remote-score:" + config_.base_url + config_.path + (config_.model.empty() ? "" : "#" + config_.model);
}

nlohmann::json RemoteScoreProvider::post(const nlohmann::json& body) {
  nlohmann::json b = body;
  if (!config_.model.empty()) b["model"] = config_.model;
  InFlightPermit permit(limiter_);
  return post_json(config_, b);
}

std::string RemoteScoreProvider::classify(std::string_view t) {
  const auto reply = post({{"task", "classify"}, {"text", t}});
  if (!reply.contains("label") || !reply["label"].is_string())
    throw ProviderError("classify reply has no label", false);
  return reply["label"].get<std::string>();
}

double RemoteScoreProvider::quality(std::string_view t) {
  const auto reply = post({{"task", "quality"}, {"text", t}});
  if (!reply.contains("score") || !reply["score"].is_number()) throw ProviderError("quality reply has no score", false);
  return reply["score"].get<double>();
}

double RemoteScoreProvider::complexity(std::string_view instruction) {
  const auto reply = post({{"task", "complexity"}, {"instruction", instruction}});
  if (!reply.contains("score") || !reply["score"].is_number())
    throw ProviderError("complexity reply has no score", false);
  return reply["score"].get<double>();
}

double RemoteScoreProvider::quality(std::string_view instruction, std::string_view response) {
  const auto reply = post({{"task", "response_quality"}, {"instruction", instruction}, {"response", response}});
  if (!reply.contains("score") || !reply["score"].is_number())
    throw ProviderError("response_quality reply has no score", false);
  return reply["score"].get<double>();
}

}  // namespace medcurate
