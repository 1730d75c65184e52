#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "medcurate/http.hpp"
#include "medcurate/judge.hpp"
#include "medcurate/quality.hpp"
#include "medcurate/sft.hpp"

// Concrete scorers and judges: deterministic mocks for tests and offline
// runs, and HTTP clients for hosted models.
namespace medcurate {

/// Keyword classifier ("medicine" / "general") and a lexical quality
/// heuristic: 6 * distinct_tokens / tokens * min(1, tokens / 64).
class MockScoreProvider final : public ScoreProvider {
 public:
  std::string identity() const override { return "mock-score:v1"; }
  std::vector<std::string> taxonomy() const override { return {"medicine", "general"}; }
  std::string classify(std::string_view text) override;
  double quality(std::string_view text) override;
};

/// complexity = 1 + min(5, instruction_tokens / 10),
/// quality = 1 + min(5, response_tokens / 20).
class MockDeitaScorer final : public DeitaScorer {
 public:
  std::string identity() const override { return "mock-deita:v1"; }
  double complexity(std::string_view instruction) override;
  double quality(std::string_view instruction, std::string_view response) override;
};

/// Rule-driven judge. Recognizes the pairwise templates (assistant or
/// response slots) and the rubric template; anything else is treated as a
/// generation request.
class MockJudge final : public JudgeProvider {
 public:
  enum class Style {
    /// Always prefers slot 1, whatever the content.
    position_biased,
    /// Prefers the answer with more code points; equal lengths tie.
    prefer_longer,
  };

  explicit MockJudge(Style style) : style_(style) {}
  std::string identity() const override;
  std::string complete(std::string_view system, std::string_view prompt) override;

 private:
  Style style_;
};

/// Text between `open` and `close` in a rendered template; empty if absent.
std::string extract_between(std::string_view text, std::string_view open, std::string_view close);

/// HTTP scorer. POSTs to {base_url}{path} (default "/score"):
///   {"task":"classify","text":...}                 -> {"label": ...}
///   {"task":"quality","text":...}                  -> {"score": ...}
///   {"task":"complexity","instruction":...}        -> {"score": ...}
///   {"task":"response_quality","instruction":...,"response":...} -> {"score": ...}
class RemoteScoreProvider final : public ScoreProvider, public DeitaScorer {
 public:
  RemoteScoreProvider(RemoteConfig config, std::vector<std::string> taxonomy);
  std::string identity() const override;
  std::vector<std::string> taxonomy() const override { return taxonomy_; }
  std::string classify(std::string_view text) override;
  double quality(std::string_view text) override;
  double complexity(std::string_view instruction) override;
  double quality(std::string_view instruction, std::string_view response) override;

 private:
  nlohmann::json post(const nlohmann::json& body);

  RemoteConfig config_;
  std::vector<std::string> taxonomy_;
  InFlightLimiter limiter_;
};

}  // namespace medcurate
