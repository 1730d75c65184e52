#include "medcurate/logprob.hpp"

#include <cmath>
#include <sstream>

#include "medcurate/digest.hpp"
#include "medcurate/errors.hpp"
#include "medcurate/text.hpp"

namespace medcurate {
namespace {

void require_continuation(std::string_view continuation) {
  if (continuation.empty()) throw ValidationError("continuation must be nonempty");
}

std::string hex_cp(char32_t c) {
  std::ostringstream s;
  s << "U+" << std::hex << std::uppercase << static_cast<std::uint32_t>(c);
  return s.str();
}

}  // namespace

double mean_nll(LogProbProvider& provider, std::string_view context, std::string_view continuation) {
  require_continuation(continuation);
  const auto tokens = provider.score(context, continuation);
  if (tokens.empty()) throw ProviderError(provider.identity() + " returned no tokens", false);
  std::string rebuilt;
  double sum = 0.0;
  for (const auto& t : tokens) {
    if (!std::isfinite(t.logprob) || t.logprob > 0.0)
      throw ProviderError(provider.identity() + " returned invalid logprob for \"" + t.token + "\"", false);
    rebuilt += t.token;
    sum += t.logprob;
  }
  if (rebuilt != continuation)
    throw ProviderError(provider.identity() + ": tokens do not reconstruct the continuation", false);
  return -sum / static_cast<double>(tokens.size());
}

UniformLM::UniformLM(std::size_t vocab_size) : vocab_size_(vocab_size) {
  if (vocab_size_ < 1) throw ValidationError("uniform LM needs a vocabulary of at least 1");
}

std::string UniformLM::identity() const { return "uniform:" + std::to_string(vocab_size_); }

std::vector<TokenLogProb> UniformLM::score(std::string_view, std::string_view continuation) {
  require_continuation(continuation);
  const double lp = -std::log(static_cast<double>(vocab_size_));
  std::vector<TokenLogProb> out;
  for (char32_t c : text::code_points(continuation)) out.push_back({text::encode_utf8(c), lp});
  return out;
}

CharNGramLM CharNGramLM::train(std::string_view text, std::size_t order) {
  const std::string owned(text);
  return train(std::span<const std::string>(&owned, 1), order);
}

CharNGramLM CharNGramLM::train(std::span<const std::string> texts, std::size_t order) {
  if (order < 1) throw ValidationError("n-gram order must be >= 1");
  CharNGramLM lm(order);
  std::string material = std::to_string(order);
  for (const auto& t : texts) {
    std::u32string seq(order - 1, kBegin);
    for (char32_t c : text::code_points(t)) {
      seq.push_back(c);
      lm.alphabet_[c] = true;
    }
    seq.push_back(kEnd);
    for (std::size_t i = order - 1; i < seq.size(); ++i) {
      auto& counts = lm.counts_[seq.substr(i - (order - 1), order - 1)];
      counts.next[seq[i]]++;
      counts.total++;
    }
    material += '\x1e';
    material += t;
  }
  lm.fingerprint_ = sha256(material).hex().substr(0, 16);
  return lm;
}

std::string CharNGramLM::identity() const {
  return "char-ngram:" + std::to_string(order_) + ":" + fingerprint_;
}

bool CharNGramLM::in_alphabet(char32_t c) const { return alphabet_.contains(c); }

double CharNGramLM::probability(std::u32string_view history, char32_t next) const {
  if (next != kEnd && !in_alphabet(next))
    throw ProviderError("character " + hex_cp(next) + " is outside the n-gram model alphabet", false);
  if (history.size() < order_ - 1) throw ValidationError("history shorter than order - 1");
  const std::u32string key(history.substr(history.size() - (order_ - 1)));
  std::size_t joint = 0, total = 0;
  if (auto it = counts_.find(key); it != counts_.end()) {
    total = it->second.total;
    if (auto jt = it->second.next.find(next); jt != it->second.next.end()) joint = jt->second;
  }
  return static_cast<double>(joint + 1) / static_cast<double>(total + vocabulary_size());
}

std::vector<TokenLogProb> CharNGramLM::score(std::string_view context, std::string_view continuation) {
  require_continuation(continuation);
  std::u32string history(order_ - 1, kBegin);
  for (char32_t c : text::code_points(context)) history.push_back(c);
  std::vector<TokenLogProb> out;
  for (char32_t c : text::code_points(continuation)) {
    out.push_back({text::encode_utf8(c), std::log(probability(history, c))});
    history.push_back(c);
  }
  return out;
}

RemoteLogProbProvider::RemoteLogProbProvider(RemoteConfig config, double log_base)
    : config_(std::move(config)),
      to_natural_(log_base > 0.0 ? std::log(log_base) : 1.0),
      limiter_(config_.max_in_flight) {
  if (config_.path.empty()) config_.path = "/v1/completions";
}

std::string RemoteLogProbProvider::identity() const {
  return "remote-logprob:" + config_.base_url + config_.path + (config_.model.empty() ? "" : "#" + config_.model);
}

std::vector<TokenLogProb> RemoteLogProbProvider::score(std::string_view context, std::string_view continuation) {
  require_continuation(continuation);
  const std::string prompt = std::string(context) + std::string(continuation);
  nlohmann::json body = {{"prompt", prompt}, {"echo", true}, {"logprobs", true}, {"max_tokens", 0}};
  if (!config_.model.empty()) body["model"] = config_.model;

  nlohmann::json reply;
  {
    InFlightPermit permit(limiter_);
    reply = post_json(config_, body);
  }

  std::vector<std::string> tokens;
  std::vector<nlohmann::json> logprobs;
  try {
    const auto& lp = reply.at("choices").at(0).at("logprobs");
    tokens = lp.at("tokens").get<std::vector<std::string>>();
    logprobs = lp.at("token_logprobs").get<std::vector<nlohmann::json>>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("malformed logprobs reply: ") + e.what(), false);
  }
  if (tokens.size() != logprobs.size()) throw ProviderError("tokens/logprobs length mismatch", false);

  std::vector<TokenLogProb> out;
  std::size_t offset = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::size_t start = offset;
    offset += tokens[i].size();
    if (offset <= context.size()) continue;
    if (start < context.size())
      throw ProviderError("tokenization mismatch: token \"" + tokens[i] + "\" straddles the context boundary", false);
    if (!logprobs[i].is_number())
      throw ProviderError("no logprob for continuation token \"" + tokens[i] + "\"", false);
    out.push_back({tokens[i], logprobs[i].get<double>() * to_natural_});
  }
  if (offset != prompt.size()) throw ProviderError("tokenization mismatch: echoed tokens do not cover the prompt", false);
  std::string rebuilt;
  for (const auto& t : out) rebuilt += t.token;
  if (rebuilt != continuation) throw ProviderError("tokenization mismatch: continuation not reconstructed", false);
  return out;
}

}  // namespace medcurate
