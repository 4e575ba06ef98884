#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slicebench/llm/prompt.hpp"
#include "slicebench/metrics/metrics.hpp"
#include "slicebench/taxonomy/taxonomy.hpp"

namespace slicebench::improve {

class CategoryGap : public Error {
 public:
  explicit CategoryGap(const std::string& message) : Error("CategoryGap", message) {}
};

class MissingLabel : public Error {
 public:
  explicit MissingLabel(const std::string& task) : Error("MissingLabel", "task " + task + " has no failure label") {}
};

class BaselineMissing : public Error {
 public:
  explicit BaselineMissing(const std::string& message) : Error("BaselineMissing", message) {}
};

struct CraftedExample {
  std::string code;  // line-numbered
  std::string criterion;
  std::string reasoning;
  std::vector<int> output;
  std::vector<taxonomy::Cause> covered_categories;
  std::vector<taxonomy::FaultLocation> location_notes;
};

/// The bundled crafted example: a nested loop feeding a conditional assignment.
const CraftedExample& default_crafted_example();

/// Vanilla (one-shot CoT) prompt with the crafted example in the example
/// block. Throws CategoryGap when the example does not cover Complex Control
/// Flow and Variable Declarations and Assignments.
std::string craft_enhanced_prompt(const llm::PromptSpec& spec, const CraftedExample& example);

/// Feedback text appended to a task prompt. Never contains line numbers
/// other than those quoted from the prior answer.
std::string feedback_stanza(const std::string& prior_response, const taxonomy::TaskLabel& feedback, int iteration);

/// Original prompt with the feedback stanza inserted before its closing
/// "Output:" line. Throws MissingLabel when `feedback` is null.
std::string iterative_reprompt(const std::string& task_id, const std::string& original_prompt,
                               const std::string& prior_response, const taxonomy::TaskLabel* feedback, int iteration);

struct IterationRecord {
  std::string task_id;
  std::string model;
  int iteration = 1;
  std::string prior_response;
  taxonomy::TaskLabel feedback;
  std::string prompt;
  std::string response;
  metrics::TaskScore score;
};

struct ImprovementRow {
  std::string model;
  std::string mode = "static";
  std::string strategy;  // "crafted" or "iterative"
  double vanilla = 0.0;  // Acc-D percent
  double improved = 0.0;
  double delta = 0.0;
};

/// Replaces baseline scores of re-run tasks by their improved scores.
std::vector<std::vector<metrics::TaskScore>> merge_scores(const std::vector<std::vector<metrics::TaskScore>>& baseline,
                                                          const std::vector<std::vector<metrics::TaskScore>>& rerun);

/// Aggregates both sides and reports the Acc-D delta. Throws BaselineMissing.
ImprovementRow improvement_delta(const std::string& model, const std::string& strategy,
                                 const std::vector<std::vector<metrics::TaskScore>>& baseline,
                                 const std::vector<std::vector<metrics::TaskScore>>& improved);

/// Reference Acc-D bars per model: vanilla, crafted and, where measured, iterative.
struct ImprovementBars {
  std::string model;
  double vanilla = 0.0;
  double crafted = 0.0;
  std::optional<double> iterative;
};

std::vector<ImprovementBars> load_improvement_bars(const std::filesystem::path& path);
/// Plain-text table with two-decimal bars and deltas against vanilla.
std::string render_improvement_bars(const std::vector<ImprovementBars>& bars);

}  // namespace slicebench::improve
