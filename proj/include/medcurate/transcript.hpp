#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "medcurate/judge.hpp"
#include "medcurate/logprob.hpp"
#include "medcurate/quality.hpp"
#include "medcurate/sft.hpp"

namespace medcurate {

enum class TranscriptMode {
  /// Serve known requests from the transcript, forward new ones and keep
  /// their replies.
  record,
  /// Serve only from the transcript; an unknown request is a TranscriptMiss.
  replay,
};

TranscriptMode parse_transcript_mode(std::string_view);

/// Provider request/reply cache keyed by the SHA-256 of the request JSON.
/// Successful replies and non-retryable provider errors are stored;
/// retryable errors pass through so retries still reach the live provider.
/// Thread-safe.
class Transcript {
 public:
  Transcript(std::filesystem::path path, TranscriptMode mode);

  nlohmann::json call(const nlohmann::json& request, const std::function<nlohmann::json()>& live);

  /// Writes every entry as one JSON line, sorted by key.
  void save() const;

  TranscriptMode mode() const { return mode_; }
  std::size_t size() const;
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  std::filesystem::path path_;
  TranscriptMode mode_;
  mutable std::mutex mu_;
  std::map<std::string, std::pair<nlohmann::json, nlohmann::json>> entries_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

class TranscriptScoreProvider final : public ScoreProvider {
 public:
  TranscriptScoreProvider(std::shared_ptr<ScoreProvider> inner, std::shared_ptr<Transcript> transcript)
      : inner_(std::move(inner)), transcript_(std::move(transcript)) {}
  std::string identity() const override { return inner_->identity(); }
  std::vector<std::string> taxonomy() const override { return inner_->taxonomy(); }
  std::string classify(std::string_view text) override;
  double quality(std::string_view text) override;

 private:
  std::shared_ptr<ScoreProvider> inner_;
  std::shared_ptr<Transcript> transcript_;
};

class TranscriptLogProbProvider final : public LogProbProvider {
 public:
  TranscriptLogProbProvider(std::shared_ptr<LogProbProvider> inner, std::shared_ptr<Transcript> transcript)
      : inner_(std::move(inner)), transcript_(std::move(transcript)) {}
  std::string identity() const override { return inner_->identity(); }
  std::vector<TokenLogProb> score(std::string_view context, std::string_view continuation) override;

 private:
  std::shared_ptr<LogProbProvider> inner_;
  std::shared_ptr<Transcript> transcript_;
};

class TranscriptJudgeProvider final : public JudgeProvider {
 public:
  TranscriptJudgeProvider(std::shared_ptr<JudgeProvider> inner, std::shared_ptr<Transcript> transcript)
      : inner_(std::move(inner)), transcript_(std::move(transcript)) {}
  std::string identity() const override { return inner_->identity(); }
  std::string complete(std::string_view system, std::string_view prompt) override;

 private:
  std::shared_ptr<JudgeProvider> inner_;
  std::shared_ptr<Transcript> transcript_;
};

class TranscriptDeitaScorer final : public DeitaScorer {
 public:
  TranscriptDeitaScorer(std::shared_ptr<DeitaScorer> inner, std::shared_ptr<Transcript> transcript)
      : inner_(std::move(inner)), transcript_(std::move(transcript)) {}
  std::string identity() const override { return inner_->identity(); }
  double complexity(std::string_view instruction) override;
  double quality(std::string_view instruction, std::string_view response) override;

 private:
  std::shared_ptr<DeitaScorer> inner_;
  std::shared_ptr<Transcript> transcript_;
};

}  // namespace medcurate
