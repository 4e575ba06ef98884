#include "slicebench/slicing/dynamic_slicer.hpp"

#include <algorithm>

namespace slicebench::slicing {

std::vector<std::int64_t> dynamic_slice_instances(const frontend::Ast& ast, const ExecutionTrace& trace, int line) {
  std::int64_t start = -1;
  for (auto it = trace.entries.rbegin(); it != trace.entries.rend(); ++it) {
    const auto& s = ast.stmt(it->stmt);
    if (s.kind == frontend::StmtKind::MethodDecl) continue;
    if (s.spans(line)) {
      start = it->seq;
      break;
    }
  }
  if (start < 0) throw CriterionNotExecuted(line);

  std::vector<char> seen(trace.entries.size(), 0);
  std::vector<std::int64_t> work{start};
  seen[static_cast<std::size_t>(start)] = 1;
  while (!work.empty()) {
    const auto& e = trace.entries[static_cast<std::size_t>(work.back())];
    work.pop_back();
    auto visit = [&](std::int64_t seq) {
      if (seq < 0 || seen[static_cast<std::size_t>(seq)]) return;
      seen[static_cast<std::size_t>(seq)] = 1;
      work.push_back(seq);
    };
    for (const auto& u : e.uses) visit(u.seq);
    visit(e.control_parent);
  }
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i]) out.push_back(static_cast<std::int64_t>(i));
  }
  return out;
}

Slice dynamic_backward_slice(const frontend::Ast& ast, const ExecutionTrace& trace, int line,
                             StructuralLines structural) {
  std::vector<frontend::StmtId> stmts;
  for (std::int64_t seq : dynamic_slice_instances(ast, trace, line)) {
    stmts.push_back(trace.entries[static_cast<std::size_t>(seq)].stmt);
  }
  std::sort(stmts.begin(), stmts.end());
  stmts.erase(std::unique(stmts.begin(), stmts.end()), stmts.end());
  Slice slice;
  slice.lines = project_lines(ast, stmts, structural);
  slice.criterion = SlicingCriterion{Mode::Dynamic, "", line};
  return slice;
}

}  // namespace slicebench::slicing
