#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "slicebench/error.hpp"
#include "slicebench/flow/pdg.hpp"

namespace slicebench::metrics {

class EmptyTruth : public Error {
 public:
  explicit EmptyTruth(const std::string& task) : Error("EmptyTruth", "ground truth of " + task + " is empty") {}
};

class RunMismatch : public Error {
 public:
  explicit RunMismatch(const std::string& message) : Error("RunMismatch", message) {}
};

enum class AccDMode { Lines, Edges };

AccDMode acc_d_mode_from_string(const std::string& text);
const char* to_string(AccDMode mode);

bool exact_match(const std::vector<int>& pred, const std::vector<int>& truth);

/// |pred ∩ truth| / |truth| over line sets.
double dependence_accuracy(const std::vector<int>& pred, const std::vector<int>& truth);

using LineEdge = std::pair<int, int>;  // (source line, target line)

/// Dependence edges of the program lifted to lines (self-loops dropped).
std::set<LineEdge> line_edges(const frontend::Ast& ast, const flow::Pdg& pdg);

/// Edge-level recall: edges with both ends in the truth set versus those with
/// both ends in the prediction as well. Falls back to line recall when the
/// truth induces no edge.
double dependence_accuracy_edges(const std::vector<int>& pred, const std::vector<int>& truth,
                                 const std::set<LineEdge>& edges);

struct TaskScore {
  std::string task_id;
  bool exact_match = false;
  double acc_d = 0.0;  // [0, 1]
  bool parse_failed = false;

  friend bool operator==(const TaskScore&, const TaskScore&) = default;
};

/// Scores a parsed prediction; throws EmptyTruth.
TaskScore score_task(const std::string& task_id, const std::vector<int>& pred, const std::vector<int>& truth);
TaskScore score_task(const std::string& task_id, const std::vector<int>& pred, const std::vector<int>& truth,
                     AccDMode mode, const std::set<LineEdge>* edges);

/// Unsuccessful slice for triage purposes: Acc-D below 100%. A prediction with
/// only extra lines is not a failure even though it misses the exact match.
inline bool is_failure(const TaskScore& s) { return s.acc_d < 1.0; }

/// Parse failures score zero and stay in the denominator.
TaskScore parse_failure_score(const std::string& task_id);

enum class Grouping { PerTask, PerProgram };

struct ExperimentAggregate {
  std::string model;
  std::string mode;
  std::string strategy;
  int runs = 0;
  double acc_d = 0.0;   // percent
  double acc_em = 0.0;  // percent
  std::vector<double> per_run_acc_d;   // percent
  std::vector<double> per_run_acc_em;  // percent
};

/// Program id of a task id ("p03:static" -> "p03").
std::string program_of(const std::string& task_id);

/// Mean over runs of per-run means. Throws RunMismatch when runs cover
/// different task sets, or when there are no runs.
ExperimentAggregate aggregate(const std::vector<std::vector<TaskScore>>& runs, Grouping grouping = Grouping::PerTask);

/// Two-decimal rendering used in reports ("60.84").
std::string format_percent(double value);

struct StatTestResult {
  double u_statistic = 0.0;  // U of sample a: pairs (x in a, y in b) with x > y, ties count 1/2
  double u_other = 0.0;      // U of sample b; u_statistic + u_other = n_a * n_b
  double z = 0.0;
  double p_value = 1.0;
  std::string method = "normal-approximation-with-tie-correction";
  bool degenerate = false;   // every value identical; p = 1 by convention
};

/// Rank-sum U with midranks; two-sided p from the normal approximation with
/// tie and continuity corrections. Throws Error("EmptySample").
StatTestResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace slicebench::metrics
