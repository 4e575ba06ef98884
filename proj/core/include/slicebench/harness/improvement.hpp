#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slicebench/harness/experiment.hpp"
#include "slicebench/improve/improve.hpp"
#include "slicebench/taxonomy/taxonomy.hpp"

namespace slicebench::improve {

void to_json(nlohmann::json& j, const IterationRecord& r);
void from_json(const nlohmann::json& j, IterationRecord& r);

}  // namespace slicebench::improve

namespace slicebench::harness {

/// Experiment names used for improvement re-runs and their mock fixtures.
inline constexpr const char* kVanilla = "vanilla";
inline constexpr const char* kCrafted = "crafted";
/// "iterative" for the first iteration, "iterative-<k>" afterwards.
std::string iterative_experiment(int iteration);

std::vector<improve::IterationRecord> load_iterations(const std::filesystem::path& path);

/// Whether a task failed in the vanilla baseline: nullopt when the task has
/// no run-1 baseline record for `model`.
std::optional<bool> baseline_failed(const std::vector<ExperimentRecord>& baseline, const std::string& model,
                                    const std::string& task_id);

struct RepromptInputs {
  const Dataset* dataset = nullptr;
  const std::map<std::string, GroundTruth>* truth = nullptr;
  const llm::ModelConfig* model = nullptr;
  llm::Provider* provider = nullptr;
  metrics::AccDMode acc_d = metrics::AccDMode::Lines;
};

/// One feedback round on `task_id`. The prior answer is the latest iteration
/// in `history` for this model, or else the run-1 vanilla response.
/// Throws MissingLabel, BaselineMissing or provider errors.
improve::IterationRecord reprompt_once(const RepromptInputs& in, const std::vector<ExperimentRecord>& baseline,
                                       const std::vector<improve::IterationRecord>& history,
                                       const std::string& task_id, const taxonomy::TaskLabel* label);

struct ImprovementResult {
  std::vector<improve::ImprovementRow> rows;
  std::vector<improve::IterationRecord> iterations;  // iterative strategy only
  RunSummary run;                                   // crafted strategy only
};

/// Re-runs every task with the crafted example and compares against the
/// vanilla one-shot CoT records of the same models and modes.
ImprovementResult run_crafted(const ExperimentConfig& config, const Dataset& dataset,
                              const std::map<std::string, GroundTruth>& truth,
                              const std::vector<ExperimentRecord>& baseline, const improve::CraftedExample& example,
                              const RunOptions& options = {});

/// Re-prompts every labeled task up to config.max_iterations times, stopping
/// early once Acc-D reaches 100%; appends iterations to config.iterations.
ImprovementResult run_iterative(const ExperimentConfig& config, const Dataset& dataset,
                                const std::map<std::string, GroundTruth>& truth,
                                const std::vector<ExperimentRecord>& baseline, const taxonomy::LabelStore& labels,
                                const ProviderFactory& factory = {});

/// Baseline runs with each re-prompted task replaced by its last iteration.
std::vector<std::vector<metrics::TaskScore>> apply_iterations(
    const std::vector<std::vector<metrics::TaskScore>>& baseline,
    const std::vector<improve::IterationRecord>& iterations, const std::string& model);

}  // namespace slicebench::harness
