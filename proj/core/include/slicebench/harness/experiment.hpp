#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "slicebench/harness/ground_truth.hpp"
#include "slicebench/llm/prompt.hpp"
#include "slicebench/llm/provider.hpp"
#include "slicebench/llm/response_parser.hpp"
#include "slicebench/metrics/metrics.hpp"

namespace slicebench::harness {

struct ExperimentConfig {
  std::string name = "vanilla";  // experiment name; also the mock fixture subdirectory
  std::filesystem::path dataset = "corpus";
  std::vector<llm::ModelConfig> models;
  std::vector<llm::Strategy> strategies = {llm::Strategy::ZeroShot, llm::Strategy::OneShot, llm::Strategy::OneShotCot};
  std::vector<slicing::Mode> modes = {slicing::Mode::Static, slicing::Mode::Dynamic};
  int runs = 3;
  int concurrency = 4;
  std::filesystem::path output = "results/results.jsonl";
  std::filesystem::path fixtures = "fixtures";
  std::filesystem::path cache_dir = ".slicebench-cache";
  std::filesystem::path labels = "results/labels.jsonl";
  std::filesystem::path iterations = "results/iterations.jsonl";
  metrics::AccDMode acc_d = metrics::AccDMode::Lines;
  slicing::StructuralLines structural = slicing::StructuralLines::Include;
  int max_iterations = 1;

  /// Throws ConfigError for runs < 1, empty model/strategy/mode lists or bad models.
  void validate() const;
};

/// Parses a config; relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

struct ExperimentRecord {
  std::string experiment;
  std::string task_id;
  std::string program_id;
  std::string mode;
  std::string criterion;
  std::string strategy;
  std::string model;
  int run = 1;
  std::string prompt_hash;
  std::string raw_response;
  std::optional<std::vector<int>> predicted;
  std::optional<llm::ParseFailure> failure;
  std::vector<std::string> warnings;
  std::vector<int> ground_truth;
  metrics::TaskScore score;
  double latency_ms = 0.0;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int retry_count = 0;
  std::string error_kind;  // provider error such as ContextOverflow; empty when the call succeeded
  std::string error;

  /// experiment|model|strategy|task|run
  std::string key() const;
};

void to_json(nlohmann::json& j, const ExperimentRecord& r);
void from_json(const nlohmann::json& j, ExperimentRecord& r);

/// Reads a JSONL results file. A torn final line (interrupted write) is ignored.
std::vector<ExperimentRecord> load_records(const std::filesystem::path& path);

/// Serialized append-only JSONL writer; each append is flushed before returning.
class RecordSink {
 public:
  explicit RecordSink(std::filesystem::path path);
  void append(const nlohmann::json& j);

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

/// Parses and scores a raw response against the ground truth.
void score_record(ExperimentRecord& record, const ProgramEntry& program, metrics::AccDMode mode);

using PromptBuilder = std::function<std::string(const llm::PromptSpec&)>;
using ProviderFactory = std::function<std::unique_ptr<llm::Provider>(const llm::ModelConfig&)>;

struct RunSummary {
  std::size_t total = 0;     // cartesian size over tasks with ground truth
  std::size_t executed = 0;  // calls made in this invocation
  std::size_t resumed = 0;   // already present in the output
  std::size_t errors = 0;    // records carrying a provider error
  std::vector<std::string> tasks_without_truth;
};

struct RunOptions {
  std::string experiment;         // overrides config.name when set
  PromptBuilder prompt_builder;   // defaults to llm::build_prompt
  ProviderFactory provider_factory;  // defaults to llm::make_provider over config.fixtures
  std::optional<std::size_t> stop_after;  // stop after this many new records (interruption testing)
};

/// Executes model x strategy x mode x task x run with bounded concurrency.
/// Records already present in config.output (by key) are skipped.
RunSummary run_experiment(const ExperimentConfig& config, const Dataset& dataset,
                          const std::map<std::string, GroundTruth>& truth, const RunOptions& options = {});

/// Builds the task prompt used by the runner for `strategy`.
llm::PromptSpec prompt_spec(const ProgramEntry& program, const SliceTask& task, llm::Strategy strategy);

}  // namespace slicebench::harness
