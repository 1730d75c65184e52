#include "medcurate/transcript.hpp"

#include <fstream>

#include "medcurate/digest.hpp"
#include "medcurate/errors.hpp"

namespace medcurate {

using json = nlohmann::json;

TranscriptMode parse_transcript_mode(std::string_view s) {
  if (s == "record") return TranscriptMode::record;
  if (s == "replay") return TranscriptMode::replay;
  throw ConfigError("transcript mode must be record or replay, got \"" + std::string(s) + "\"");
}

Transcript::Transcript(std::filesystem::path path, TranscriptMode mode) : path_(std::move(path)), mode_(mode) {
  std::ifstream in(path_);
  if (!in) {
    if (mode_ == TranscriptMode::replay) throw IoError("cannot open transcript " + path_.string());
    return;
  }
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      entries_[j.at("key").get<std::string>()] = {j.at("request"), j.at("reply")};
    } catch (const json::exception& e) {
      throw IoError(path_.string() + ":" + std::to_string(n) + ": malformed transcript line: " + e.what());
    }
  }
}

json Transcript::call(const json& request, const std::function<json()>& live) {
  const std::string key = sha256(request.dump()).hex();
  json reply;
  {
    std::lock_guard lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      reply = it->second.second;
    } else if (mode_ == TranscriptMode::replay) {
      ++misses_;
      throw TranscriptMiss("transcript " + path_.string() + " has no reply for request " + key.substr(0, 16));
    } else {
      ++misses_;
    }
  }
  if (reply.is_null()) {
    try {
      reply = {{"ok", live()}};
    } catch (const ProviderError& e) {
      if (e.retryable()) throw;
      reply = {{"error", e.what()}};
    }
    std::lock_guard lock(mu_);
    entries_.emplace(key, std::make_pair(request, reply));
  }
  if (reply.contains("error")) throw ProviderError(reply.at("error").get<std::string>(), false);
  return reply.at("ok");
}

void Transcript::save() const {
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write transcript " + path_.string());
  for (const auto& [key, entry] : entries_)
    out << json{{"key", key}, {"request", entry.first}, {"reply", entry.second}}.dump() << '\n';
  if (!out) throw IoError("write failure in transcript " + path_.string());
}

std::size_t Transcript::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::size_t Transcript::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::size_t Transcript::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

std::string TranscriptScoreProvider::classify(std::string_view text) {
  const json req = {{"provider", inner_->identity()}, {"op", "classify"}, {"text", text}};
  return transcript_->call(req, [&] { return json(inner_->classify(text)); }).get<std::string>();
}

double TranscriptScoreProvider::quality(std::string_view text) {
  const json req = {{"provider", inner_->identity()}, {"op", "quality"}, {"text", text}};
  return transcript_->call(req, [&] { return json(inner_->quality(text)); }).get<double>();
}

std::vector<TokenLogProb> TranscriptLogProbProvider::score(std::string_view context, std::string_view continuation) {
  const json req = {
      {"provider", inner_->identity()}, {"op", "score"}, {"context", context}, {"continuation", continuation}};
  const json reply = transcript_->call(req, [&] {
    json arr = json::array();
    for (const auto& t : inner_->score(context, continuation)) arr.push_back({t.token, t.logprob});
    return arr;
  });
  std::vector<TokenLogProb> out;
  for (const auto& t : reply) out.push_back({t.at(0).get<std::string>(), t.at(1).get<double>()});
  return out;
}

std::string TranscriptJudgeProvider::complete(std::string_view system, std::string_view prompt) {
  const json req = {{"provider", inner_->identity()}, {"op", "complete"}, {"system", system}, {"prompt", prompt}};
  return transcript_->call(req, [&] { return json(inner_->complete(system, prompt)); }).get<std::string>();
}

double TranscriptDeitaScorer::complexity(std::string_view instruction) {
  const json req = {{"provider", inner_->identity()}, {"op", "complexity"}, {"instruction", instruction}};
  return transcript_->call(req, [&] { return json(inner_->complexity(instruction)); }).get<double>();
}

double TranscriptDeitaScorer::quality(std::string_view instruction, std::string_view response) {
  const json req = {
      {"provider", inner_->identity()}, {"op", "response_quality"}, {"instruction", instruction}, {"response", response}};
  return transcript_->call(req, [&] { return json(inner_->quality(instruction, response)); }).get<double>();
}

}  // namespace medcurate
