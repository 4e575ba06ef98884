#include "slicebench/frontend/ast.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace slicebench::frontend {

namespace {

constexpr std::array<std::string_view, 8> kPrimitives = {"int",  "long",  "short", "byte",
                                                         "char", "float", "double", "boolean"};

constexpr std::array<std::string_view, 11> kImmutableReferences = {
    "String",    "Integer", "Long",       "Double",     "Float", "Short",
    "Byte",      "Character", "Boolean", "BigDecimal", "BigInteger"};

}  // namespace

bool TypeRef::is_primitive() const {
  if (dims != 0) return false;
  return std::find(kPrimitives.begin(), kPrimitives.end(), name) != kPrimitives.end();
}

bool TypeRef::is_numeric() const { return is_primitive() && name != "boolean"; }

bool TypeRef::is_mutable_reference() const {
  if (dims > 0) return true;
  if (name == "void" || name.empty() || is_primitive()) return false;
  return std::find(kImmutableReferences.begin(), kImmutableReferences.end(), name) ==
         kImmutableReferences.end();
}

std::string TypeRef::str() const {
  std::string out = name;
  if (!args.empty()) {
    out += '<';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ", ";
      out += args[i].str();
    }
    out += '>';
  }
  for (int i = 0; i < dims; ++i) out += "[]";
  return out;
}

const char* to_string(StmtKind kind) {
  switch (kind) {
    case StmtKind::Import: return "import";
    case StmtKind::ClassDecl: return "class-decl";
    case StmtKind::MethodDecl: return "method-decl";
    case StmtKind::Decl: return "decl";
    case StmtKind::Assign: return "assign";
    case StmtKind::Call: return "call";
    case StmtKind::If: return "if";
    case StmtKind::Loop: return "loop";
    case StmtKind::Return: return "return";
    case StmtKind::Break: return "break";
    case StmtKind::Continue: return "continue";
    case StmtKind::Block: return "block";
  }
  return "?";
}

std::vector<int> Stmt::output_lines() const {
  std::vector<int> out;
  for (int l = line; l <= std::max(line, end_line); ++l) out.push_back(l);
  out.insert(out.end(), extra_lines.begin(), extra_lines.end());
  return out;
}

bool Stmt::spans(int physical_line) const {
  if (kind == StmtKind::Block) return false;
  if (physical_line >= line && physical_line <= end_line) return true;
  return std::find(extra_lines.begin(), extra_lines.end(), physical_line) != extra_lines.end();
}

std::optional<MethodId> Ast::find_method(const std::string& name) const {
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (methods[i].name == name) return static_cast<MethodId>(i);
  }
  return std::nullopt;
}

std::optional<MethodId> Ast::main_method() const { return find_method("main"); }

std::vector<StmtId> Ast::textual_order() const {
  std::vector<StmtId> order(stmts.size());
  for (std::size_t i = 0; i < stmts.size(); ++i) order[i] = static_cast<StmtId>(i);
  std::stable_sort(order.begin(), order.end(), [&](StmtId x, StmtId y) {
    const Stmt& a = stmt(x);
    const Stmt& b = stmt(y);
    if (a.line != b.line) return a.line < b.line;
    return a.column < b.column;
  });
  return order;
}

std::vector<std::string> Ast::names(MethodId m, const std::vector<SymbolId>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (SymbolId s : ids) out.push_back(symbol(m, s).name);
  return out;
}

}  // namespace slicebench::frontend
