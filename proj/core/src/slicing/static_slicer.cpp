#include "slicebench/slicing/static_slicer.hpp"

#include <algorithm>
#include <deque>

#include "slicebench/frontend/parser.hpp"

namespace slicebench::slicing {

using frontend::Ast;
using frontend::StmtId;
using frontend::SymbolId;
using frontend::kNone;

namespace {

bool mentions(const Ast& ast, const frontend::Stmt& s, const std::string& name, bool defs_only) {
  if (s.method == kNone) return false;
  auto match = [&](const std::vector<SymbolId>& ids) {
    return std::any_of(ids.begin(), ids.end(), [&](SymbolId v) { return ast.symbol(s.method, v).name == name; });
  };
  return match(s.defs) || (!defs_only && match(s.uses));
}

}  // namespace

StmtId static_seed(const Ast& ast, const SlicingCriterion& criterion) {
  if (criterion.variable.empty()) throw CriterionError("static criterion needs a variable");
  const auto candidates = frontend::statements_at(ast, criterion.line);
  if (candidates.empty()) throw frontend::NotFound("no statement at line " + std::to_string(criterion.line));
  for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
    if (mentions(ast, ast.stmt(*it), criterion.variable, false)) return *it;
  }
  throw CriterionError("variable '" + criterion.variable + "' does not occur at line " +
                       std::to_string(criterion.line));
}

std::vector<StmtId> static_slice_statements(const Ast& ast, const flow::Pdg& pdg, const SlicingCriterion& criterion) {
  const StmtId seed = static_seed(ast, criterion);
  std::vector<char> in_slice(ast.stmts.size(), 0);
  std::deque<StmtId> work;
  auto add = [&](StmtId s) {
    if (in_slice[static_cast<std::size_t>(s)]) return;
    in_slice[static_cast<std::size_t>(s)] = 1;
    work.push_back(s);
  };

  in_slice[static_cast<std::size_t>(seed)] = 1;
  if (mentions(ast, ast.stmt(seed), criterion.variable, true)) {
    work.push_back(seed);
  } else {
    // The seed only reads the variable: follow that variable's definitions
    // and whatever decides whether the seed executes.
    const auto& seed_stmt = ast.stmt(seed);
    for (const flow::PdgEdge* e : pdg.incoming(seed)) {
      const bool var_edge = e->kind == flow::DepKind::Data &&
                            ast.symbol(seed_stmt.method, e->var).name == criterion.variable;
      if (var_edge || e->kind == flow::DepKind::Control) add(e->from);
    }
  }

  while (!work.empty()) {
    const StmtId s = work.front();
    work.pop_front();
    for (const flow::PdgEdge* e : pdg.incoming(s)) add(e->from);
  }

  std::vector<StmtId> out;
  for (std::size_t i = 0; i < in_slice.size(); ++i) {
    if (in_slice[i]) out.push_back(static_cast<StmtId>(i));
  }
  return out;
}

Slice static_backward_slice(const Ast& ast, const flow::Pdg& pdg, const SlicingCriterion& criterion,
                            const StaticSliceOptions& options) {
  auto stmts = static_slice_statements(ast, pdg, criterion);
  if (options.include_imports) {
    std::vector<std::string> names;
    for (StmtId s : stmts) {
      const auto& r = ast.stmt(s).referenced_names;
      names.insert(names.end(), r.begin(), r.end());
    }
    for (StmtId imp : ast.imports) {
      const std::string& path = ast.stmt(imp).text;
      const std::string last = path.substr(path.rfind('.') + 1);
      if (last == "*" || std::find(names.begin(), names.end(), last) != names.end()) stmts.push_back(imp);
    }
  }
  Slice slice;
  slice.criterion = criterion;
  slice.criterion.mode = Mode::Static;
  slice.provenance = Provenance::Oracle;
  slice.lines = project_lines(ast, stmts, options.structural);
  return slice;
}

}  // namespace slicebench::slicing
