#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "medcurate/jsonl.hpp"
#include "medcurate/judge.hpp"
#include "medcurate/logprob.hpp"
#include "medcurate/quality.hpp"
#include "medcurate/retry.hpp"
#include "medcurate/sft.hpp"
#include "medcurate/transcript.hpp"

namespace medcurate {

// ---------------------------------------------------------------------------
// Providers by name
// ---------------------------------------------------------------------------

/// Builds providers from a {"name": {"kind": ..., ...}} object. Kinds:
///   mock-score, mock-deita, mock-judge {style: position_biased|prefer_longer},
///   uniform-lm {vocab_size}, ngram-lm {train_file | train_text, order},
///   remote-score {base_url, path, api_key_env, model, taxonomy},
///   remote-logprob {base_url, path, api_key_env, model, log_base},
///   remote-judge {base_url, path, api_key_env, model}.
/// Providers are constructed lazily on first use; with a transcript every
/// provider is wrapped for record/replay.
class ProviderRegistry {
 public:
  ProviderRegistry(nlohmann::json providers, std::filesystem::path base_dir,
                   std::shared_ptr<Transcript> transcript = nullptr);

  /// Throws ConfigError for an unknown kind or a malformed entry.
  void validate() const;

  bool has(const std::string& name) const { return providers_.contains(name); }
  bool provides_score(const std::string& name) const;
  bool provides_logprob(const std::string& name) const;
  bool provides_judge(const std::string& name) const;
  bool provides_deita(const std::string& name) const;

  std::shared_ptr<ScoreProvider> score(const std::string& name);
  std::shared_ptr<LogProbProvider> logprob(const std::string& name);
  std::shared_ptr<JudgeProvider> judge(const std::string& name);
  std::shared_ptr<DeitaScorer> deita(const std::string& name);

 private:
  const nlohmann::json& entry(const std::string& name) const;
  std::string kind(const std::string& name) const;

  nlohmann::json providers_;
  std::filesystem::path base_dir_;
  std::shared_ptr<Transcript> transcript_;
  std::map<std::string, std::shared_ptr<ScoreProvider>> scores_;
  std::map<std::string, std::shared_ptr<LogProbProvider>> logprobs_;
  std::map<std::string, std::shared_ptr<JudgeProvider>> judges_;
  std::map<std::string, std::shared_ptr<DeitaScorer>> deitas_;
};

// ---------------------------------------------------------------------------
// Pipeline configuration and execution
// ---------------------------------------------------------------------------

struct StageSpec {
  std::string name;
  /// One of: filter-rules, dedup, decontaminate, classify-gate,
  /// quality-gate, select-sft.
  std::string op;
  std::string provider;
  std::string scorer;
  nlohmann::json params = nlohmann::json::object();
};

struct TranscriptSpec {
  std::filesystem::path path;
  TranscriptMode mode = TranscriptMode::record;
};

struct PipelineConfig {
  std::uint64_t seed = 0;
  Schema input_schema = Schema::document;
  std::size_t max_in_flight = 8;
  RetryPolicy retry;
  std::optional<TranscriptSpec> transcript;
  nlohmann::json providers = nlohmann::json::object();
  std::vector<StageSpec> stages;
  /// Relative paths inside the config resolve against this directory.
  std::filesystem::path base_dir;
  /// The config as parsed, used for the config hash.
  nlohmann::json raw;

  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static PipelineConfig load(const std::filesystem::path& path);

  /// Checks stage names are unique, ops are known and take the schema that
  /// reaches them, and every referenced provider is declared with a
  /// compatible kind. Throws ConfigError.
  void validate() const;

  /// SHA-256 of the canonical (sorted-key) JSON of the config.
  std::string hash() const;
};

struct StageReport {
  std::string name;
  std::string op;
  std::size_t input = 0;
  std::size_t kept = 0;
  std::size_t rejected = 0;
  std::size_t quarantined = 0;
  std::map<std::string, std::size_t> reasons;
  /// "kept" / "rejected" / "quarantined" -> (file name, sha256)
  std::map<std::string, std::pair<std::string, std::string>> outputs;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

struct RunReport {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string input_file;
  std::string input_digest;
  std::size_t input_records = 0;
  std::vector<LineError> input_errors;
  std::vector<StageReport> stages;
  bool ok = true;
  std::string failed_stage;
  std::string error;
  std::string final_file;
  std::string final_digest;

  nlohmann::ordered_json to_json() const;
};

/// Runs the stages in order over `input`, writing
/// NN_<stage>.{kept,rejected,quarantined}.jsonl, final.jsonl and report.json
/// into `out_dir`. Config errors throw before any work; a failing stage
/// stops the run and the report (with every completed stage) is still
/// written and returned with ok = false.
RunReport run_pipeline(const PipelineConfig& config, const std::filesystem::path& input,
                       const std::filesystem::path& out_dir);

}  // namespace medcurate
