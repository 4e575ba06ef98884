#pragma once

#include "slicebench/slicing/interpreter.hpp"
#include "slicebench/slicing/slice.hpp"

namespace slicebench::slicing {

class CriterionNotExecuted : public Error {
 public:
  explicit CriterionNotExecuted(int line)
      : Error("CriterionNotExecuted", "no statement on line " + std::to_string(line) + " was executed") {}
};

/// Trace entries reachable backward from the last instance executed at `line`,
/// following data uses and dynamic control parents. Sorted by seq.
std::vector<std::int64_t> dynamic_slice_instances(const frontend::Ast& ast, const ExecutionTrace& trace, int line);

Slice dynamic_backward_slice(const frontend::Ast& ast, const ExecutionTrace& trace, int line,
                             StructuralLines structural = StructuralLines::Include);

}  // namespace slicebench::slicing
