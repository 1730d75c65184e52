#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "medcurate/http.hpp"

namespace medcurate {

/// One continuation token and its natural-log probability.
struct TokenLogProb {
  std::string token;
  double logprob = 0.0;
};

/// Token-level log-probabilities of a continuation given a context.
/// Each provider owns its tokenization; returned tokens concatenate back to
/// the continuation. Implementations must be safe for concurrent calls.
class LogProbProvider {
 public:
  virtual ~LogProbProvider() = default;
  virtual std::string identity() const = 0;
  /// Throws ValidationError for an empty continuation.
  virtual std::vector<TokenLogProb> score(std::string_view context, std::string_view continuation) = 0;
};

/// -(1/N) * sum of the N continuation log-probabilities. Checks that the
/// tokens reconstruct the continuation and every logprob is finite and <= 0.
double mean_nll(LogProbProvider& provider, std::string_view context, std::string_view continuation);

/// Every code point has probability 1/V regardless of context.
class UniformLM final : public LogProbProvider {
 public:
  explicit UniformLM(std::size_t vocab_size);
  std::string identity() const override;
  std::vector<TokenLogProb> score(std::string_view context, std::string_view continuation) override;

 private:
  std::size_t vocab_size_;
};

/// Character-level n-gram model with add-one smoothing over the training
/// alphabet plus an end-of-text symbol. Histories shorter than n-1 are
/// padded with a begin symbol. Immutable after training.
class CharNGramLM final : public LogProbProvider {
 public:
  static constexpr char32_t kBegin = 0x110000;
  static constexpr char32_t kEnd = 0x110001;

  static CharNGramLM train(std::span<const std::string> texts, std::size_t order = 2);
  static CharNGramLM train(std::string_view text, std::size_t order = 2);

  std::string identity() const override;
  std::vector<TokenLogProb> score(std::string_view context, std::string_view continuation) override;

  /// P(next | last order-1 symbols of history); `history` must already be
  /// padded. Throws ProviderError for a symbol outside the alphabet.
  double probability(std::u32string_view history, char32_t next) const;

  std::size_t order() const { return order_; }
  /// Alphabet size plus one for the end symbol.
  std::size_t vocabulary_size() const { return alphabet_.size() + 1; }
  bool in_alphabet(char32_t c) const;

 private:
  explicit CharNGramLM(std::size_t order) : order_(order) {}

  struct Counts {
    std::unordered_map<char32_t, std::size_t> next;
    std::size_t total = 0;
  };

  std::size_t order_;
  std::map<char32_t, bool> alphabet_;
  std::unordered_map<std::u32string, Counts> counts_;
  std::string fingerprint_;
};

/// Completions endpoint with echo: POSTs
/// {"prompt": context+continuation, "echo": true, "logprobs": true, "max_tokens": 0}
/// and reads choices[0].logprobs.{tokens, token_logprobs}. Tokens of the
/// context are dropped; a token straddling the context boundary is a fatal
/// tokenization mismatch.
class RemoteLogProbProvider final : public LogProbProvider {
 public:
  /// `log_base` is the base the server reports in (e for natural log).
  explicit RemoteLogProbProvider(RemoteConfig config, double log_base = 0.0);
  std::string identity() const override;
  std::vector<TokenLogProb> score(std::string_view context, std::string_view continuation) override;

 private:
  RemoteConfig config_;
  double to_natural_;
  InFlightLimiter limiter_;
};

}  // namespace medcurate
