#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "slicebench/error.hpp"

namespace slicebench::taxonomy {

enum class RootCause {
  LogicConditional,       // B1
  LogicLoop,              // B2
  LogicMethodInvocation,  // B3
  AmbiguityInCode,        // C1
  ComplexControlFlow,     // C2
  ModelConstraint,
};

enum class ConstraintKind { ContextWindow, IntermixedText, JsonParsing };

/// A root cause; `constraint` is set exactly when cause == ModelConstraint.
struct Cause {
  RootCause cause = RootCause::ComplexControlFlow;
  std::optional<ConstraintKind> constraint;

  friend bool operator==(const Cause&, const Cause&) = default;
  friend auto operator<=>(const Cause&, const Cause&) = default;
};

enum class FaultLocation {
  ConditionalStatements,              // A1
  LoopConstructs,                     // A2
  MethodInvocationsAndReturns,        // A3
  VariableDeclarationsAndAssignments, // A4
  ClassDeclarations,                  // A5
  Imports,                            // A6
};

class TaxonomyError : public Error {
 public:
  using Error::Error;
};

/// "B1".."C2", "MC-ContextWindow", "MC-IntermixedText", "MC-JsonParsing".
std::string code(const Cause& c);
Cause cause_from_code(const std::string& text);
std::string display_name(const Cause& c);
/// "Lack of Logic Understanding", "Code Complexity" or "Model-specific Constraints".
std::string category_name(const Cause& c);
const std::vector<Cause>& all_causes();

std::string code(FaultLocation l);
FaultLocation location_from_code(const std::string& text);
std::string display_name(FaultLocation l);
const std::vector<FaultLocation>& all_locations();

struct FailureLabel {
  std::string task_id;
  Cause root_cause;
  std::vector<FaultLocation> locations;  // non-empty, sorted, unique
  std::string reviewer;
  std::string timestamp;  // ISO 8601, UTC
  std::string notes;
  int version = 0;        // assigned by the store, per (task, reviewer)
};

/// Consensus decision that settles a disagreement on one task.
struct Resolution {
  std::string task_id;
  Cause root_cause;
  std::vector<FaultLocation> locations;
  std::string resolver;
  std::string timestamp;
  std::string notes;
};

void to_json(nlohmann::json& j, const FailureLabel& l);
void from_json(const nlohmann::json& j, FailureLabel& l);
void to_json(nlohmann::json& j, const Resolution& r);
void from_json(const nlohmann::json& j, Resolution& r);

/// Effective classification of one task once reviewers agree or a resolution exists.
struct TaskLabel {
  std::string task_id;
  Cause root_cause;
  std::vector<FaultLocation> locations;
};

struct RecordOutcome {
  FailureLabel label;
  bool disagreement = false;  // another reviewer's latest label differs and no resolution settles it
};

/// Append-only, JSONL-backed label store. Writes are serialized and flushed
/// before they return; reads may run concurrently with each other.
class LabelStore {
 public:
  /// In-memory store.
  LabelStore() = default;
  /// Loads `path` if it exists; later writes append to it.
  explicit LabelStore(std::filesystem::path path);

  /// Looks up a task: nullopt if unknown, otherwise whether it failed.
  using TaskLookup = std::function<std::optional<bool>(const std::string&)>;

  /// Validates and appends. Throws UnknownTask, NotAFailure or TaxonomyError.
  RecordOutcome record_label(FailureLabel label, const TaskLookup& lookup = {});
  void resolve(Resolution resolution);

  std::vector<FailureLabel> history(const std::string& task_id) const;
  std::vector<Resolution> resolutions(const std::string& task_id) const;
  std::vector<std::string> labeled_tasks() const;
  std::vector<std::string> disagreements() const;
  std::optional<TaskLabel> effective(const std::string& task_id) const;

  /// One entry per labeled task. Throws UnresolvedDisagreement naming tasks.
  std::vector<TaskLabel> resolved_labels() const;
  std::size_t size() const;

 private:
  struct Entry {
    std::optional<FailureLabel> label;
    std::optional<Resolution> resolution;
  };
  std::optional<TaskLabel> effective_locked(const std::string& task_id, bool& disagreement) const;
  void append(const nlohmann::json& j);

  std::filesystem::path path_;
  std::vector<Entry> entries_;
  mutable std::mutex mutex_;
};

struct Distribution {
  std::size_t total = 0;  // labeled tasks
  std::map<std::string, std::size_t> root_causes;  // by code, zero counts included
  std::map<std::string, std::size_t> locations;    // memberships by code
  std::size_t location_memberships = 0;
};

Distribution distribution(const std::vector<TaskLabel>& labels);
double percent_of(std::size_t count, std::size_t total);

struct FlowTriple {
  std::string root_cause;
  std::string location;
  std::size_t count = 0;

  friend bool operator==(const FlowTriple&, const FlowTriple&) = default;
};

/// Triples with count > 0, ordered by cause then location.
std::vector<FlowTriple> flow_map(const std::vector<TaskLabel>& labels);
std::string flow_map_csv(const std::vector<FlowTriple>& flows);

std::string utc_timestamp();

}  // namespace slicebench::taxonomy
