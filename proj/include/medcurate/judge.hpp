#pragma once

#include <string>
#include <string_view>

#include "medcurate/http.hpp"
#include "medcurate/retry.hpp"

namespace medcurate {

/// Which of two presented answers a judge preferred, by slot.
enum class Verdict { first, second, equal };

std::string_view to_string(Verdict);

/// Chat-style model used both to generate responses and to judge them.
/// Implementations must be safe for concurrent calls.
class JudgeProvider {
 public:
  virtual ~JudgeProvider() = default;
  virtual std::string identity() const = 0;
  virtual std::string complete(std::string_view system, std::string_view prompt) = 0;
};

/// Reads the label on the last nonempty line of a judge reply:
/// "<a> is better than <b>" -> first, "... worse than ..." -> second,
/// "... equal to ..." -> equal. Case-insensitive; surrounding quotes,
/// asterisks and a trailing period are ignored. Anything else throws
/// ParseError.
Verdict parse_verdict(std::string_view reply, std::string_view first_name = "Assistant 1",
                      std::string_view second_name = "Assistant 2");

/// Plain generation with a system prompt.
std::string generate(JudgeProvider& judge, std::string_view prompt, std::string_view system,
                     const RetryPolicy& retry = {});

/// Four-aspect comparison of two responses to `question` through the
/// preference comparison template.
Verdict compare(JudgeProvider& judge, std::string_view question, std::string_view response1,
                std::string_view response2, const RetryPolicy& retry = {});

/// OpenAI-compatible chat completions client (POST {base}/v1/chat/completions,
/// temperature 0). Reads choices[0].message.content.
class RemoteJudgeProvider final : public JudgeProvider {
 public:
  explicit RemoteJudgeProvider(RemoteConfig config);
  std::string identity() const override;
  std::string complete(std::string_view system, std::string_view prompt) override;

 private:
  RemoteConfig config_;
  InFlightLimiter limiter_;
};

}  // namespace medcurate
