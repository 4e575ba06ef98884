#pragma once

#include <string>
#include <string_view>

#include "slicebench/frontend/ast.hpp"
#include "slicebench/frontend/lexer.hpp"

namespace slicebench::frontend {

/// Parses Java-subset source. Throws ParseError (never anything else) for
/// input outside the subset; the grammar is documented in docs/subset-grammar.md.
Ast parse_program(std::string_view source, const std::string& id);

class NotFound : public Error {
 public:
  explicit NotFound(const std::string& message) : Error("NotFound", message) {}
};

/// Statement anchored at or spanning `line`; the textually earliest one when
/// several share the line. Throws NotFound for blank, comment and brace lines.
StmtId statement_at(const Ast& ast, int line);

/// Every statement anchored at or spanning `line`, in textual order.
std::vector<StmtId> statements_at(const Ast& ast, int line);

}  // namespace slicebench::frontend
