#include "medcurate/judge.hpp"

#include <algorithm>
#include <cctype>

#include "medcurate/errors.hpp"
#include "medcurate/templates.hpp"
#include "medcurate/text.hpp"

namespace medcurate {
namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool strip_prefix(std::string& s, std::string_view p) {
  if (s.starts_with(p)) {
    s.erase(0, p.size());
    return true;
  }
  return false;
}

bool strip_suffix(std::string& s, std::string_view p) {
  if (s.ends_with(p)) {
    s.erase(s.size() - p.size());
    return true;
  }
  return false;
}

std::string last_nonempty_line(std::string_view reply) {
  std::string last;
  std::size_t start = 0;
  while (start <= reply.size()) {
    auto end = reply.find('\n', start);
    if (end == std::string_view::npos) end = reply.size();
    auto line = text::trim(reply.substr(start, end - start));
    if (!line.empty()) last = std::move(line);
    start = end + 1;
  }
  return last;
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::first: return "first";
    case Verdict::second: return "second";
    case Verdict::equal: return "equal";
  }
  return "?";
}

Verdict parse_verdict(std::string_view reply, std::string_view first_name, std::string_view second_name) {
  std::string line = last_nonempty_line(reply);
  static constexpr std::string_view wrappers[] = {"\"", "'", "`", "*", "“", "”", "‘", "’", "。", "."};
  for (bool changed = true; changed;) {
    changed = false;
    line = text::trim(line);
    for (auto w : wrappers) changed = strip_prefix(line, w) || strip_suffix(line, w) || changed;
  }
  const std::string got = lower_ascii(line);
  const std::string a = lower_ascii(first_name), b = lower_ascii(second_name);
  if (got == a + " is better than " + b) return Verdict::first;
  if (got == a + " is worse than " + b) return Verdict::second;
  if (got == a + " is equal to " + b) return Verdict::equal;
  throw ParseError("judge reply has no verdict label on its last line");
}

std::string generate(JudgeProvider& judge, std::string_view prompt, std::string_view system, const RetryPolicy& retry) {
  auto out = with_retries(retry, [&] { return judge.complete(system, prompt); });
  if (text::trim(out).empty()) throw ProviderError(judge.identity() + " generated an empty response", false);
  return out;
}

Verdict compare(JudgeProvider& judge, std::string_view question, std::string_view response1,
                std::string_view response2, const RetryPolicy& retry) {
  const auto prompt = dpo_compare_template().render(
      {{"question", std::string(question)}, {"response1", std::string(response1)}, {"response2", std::string(response2)}});
  const auto reply = with_retries(retry, [&] { return judge.complete({}, prompt); });
  return parse_verdict(reply, "Response 1", "Response 2");
}

RemoteJudgeProvider::RemoteJudgeProvider(RemoteConfig config)
    : config_(std::move(config)), limiter_(config_.max_in_flight) {
  if (config_.path.empty()) config_.path = "/v1/chat/completions";
}

std::string RemoteJudgeProvider::identity() const {
  return "remote-judge:" + config_.base_url + config_.path + (config_.model.empty() ? "" : "#" + config_.model);
}

std::string RemoteJudgeProvider::complete(std::string_view system, std::string_view prompt) {
  nlohmann::json messages = nlohmann::json::array();
  if (!system.empty()) messages.push_back({{"role", "system"}, {"content", std::string(system)}});
  messages.push_back({{"role", "user"}, {"content", std::string(prompt)}});
  nlohmann::json body = {{"messages", messages}, {"temperature", 0}};
  if (!config_.model.empty()) body["model"] = config_.model;

  nlohmann::json reply;
  {
    InFlightPermit permit(limiter_);
    reply = post_json(config_, body);
  }
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed chat reply: ") + e.what(), false);
  }
}

}  // namespace medcurate
