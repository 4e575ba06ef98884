#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slicebench/error.hpp"
#include "slicebench/flow/pdg.hpp"

namespace slicebench::slicing {

/// A use of `var` whose value came from trace entry `seq`. Calls add the
/// pseudo-variables `<ret>` (the callee's return instance) and `<out:p>`
/// (the callee's last definition of reference parameter p).
struct TraceUse {
  std::string var;
  std::int64_t seq = -1;

  friend bool operator==(const TraceUse&, const TraceUse&) = default;
};

struct TraceDef {
  std::string var;
  std::string value;  // display snapshot

  friend bool operator==(const TraceDef&, const TraceDef&) = default;
};

/// One completed statement instance. Method entries appear as instances of
/// the method declaration statement; they define the parameters.
struct TraceEntry {
  std::int64_t seq = 0;
  int line = 0;
  frontend::StmtId stmt = frontend::kNone;
  frontend::MethodId method = frontend::kNone;
  std::vector<TraceDef> defs;
  std::vector<TraceUse> uses;
  std::int64_t control_parent = -1;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct ExecutionTrace {
  std::vector<TraceEntry> entries;
  std::string return_value;  // display of main's result
};

struct ExecuteOptions {
  std::int64_t step_budget = 1'000'000;
  int max_call_depth = 400;
};

class RuntimeError : public Error {
 public:
  RuntimeError(const std::string& message, int line, std::int64_t seq)
      : Error("RuntimeError", message + " at line " + std::to_string(line)), line_(line), seq_(seq) {}

  int line() const noexcept { return line_; }
  std::int64_t seq() const noexcept { return seq_; }

 private:
  int line_;
  std::int64_t seq_;
};

class StepBudgetExceeded : public Error {
 public:
  explicit StepBudgetExceeded(std::int64_t budget)
      : Error("StepBudgetExceeded", "execution exceeded " + std::to_string(budget) + " steps") {}
};

/// Runs `main` and records every statement instance. Dynamic control parents
/// come from the static control dependences in `pdg`.
ExecutionTrace execute(const frontend::Ast& ast, const flow::Pdg& pdg, const ExecuteOptions& options = {});
ExecutionTrace execute(const frontend::Ast& ast, const ExecuteOptions& options = {});

/// One JSON object per trace entry.
std::string trace_to_jsonl(const ExecutionTrace& trace);

}  // namespace slicebench::slicing
