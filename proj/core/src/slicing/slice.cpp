#include "slicebench/slicing/slice.hpp"

#include <algorithm>

namespace slicebench::slicing {

const char* to_string(Mode mode) { return mode == Mode::Static ? "static" : "dynamic"; }

Mode mode_from_string(const std::string& text) {
  if (text == "static") return Mode::Static;
  if (text == "dynamic") return Mode::Dynamic;
  throw Error("InvalidArgument", "unknown slicing mode '" + text + "'");
}

std::string to_string(const SlicingCriterion& c) {
  if (c.mode == Mode::Dynamic) return std::to_string(c.line);
  return c.variable + "@" + std::to_string(c.line);
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Oracle: return "oracle";
    case Provenance::Llm: return "llm";
    case Provenance::HumanVerified: return "human-verified";
  }
  return "?";
}

StructuralLines structural_lines_from_string(const std::string& text) {
  if (text == "include") return StructuralLines::Include;
  if (text == "exclude") return StructuralLines::Exclude;
  throw Error("InvalidArgument", "--structural-lines must be include or exclude, got '" + text + "'");
}

std::vector<int> project_lines(const frontend::Ast& ast, const std::vector<frontend::StmtId>& stmts,
                               StructuralLines structural) {
  std::vector<int> lines;
  for (frontend::StmtId id : stmts) {
    const auto& s = ast.stmt(id);
    const bool header = s.kind == frontend::StmtKind::MethodDecl || s.kind == frontend::StmtKind::ClassDecl;
    if (!header || structural == StructuralLines::Include) {
      const auto own = s.output_lines();
      lines.insert(lines.end(), own.begin(), own.end());
    }
    if (structural == StructuralLines::Include) {
      if (s.method != frontend::kNone) lines.push_back(ast.stmt(ast.method(s.method).decl).line);
      if (s.class_index != frontend::kNone) {
        lines.push_back(ast.stmt(ast.classes[static_cast<std::size_t>(s.class_index)].decl).line);
      }
    }
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return lines;
}

}  // namespace slicebench::slicing
