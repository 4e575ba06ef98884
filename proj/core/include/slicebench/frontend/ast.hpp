#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slicebench/frontend/source_program.hpp"

namespace slicebench::frontend {

using StmtId = int;
using SymbolId = int;  // index into the owning method's symbol table
using MethodId = int;

inline constexpr int kNone = -1;

struct TypeRef {
  std::string name;  // last segment of the (possibly qualified) name; "void" for no value
  std::vector<TypeRef> args;
  int dims = 0;

  bool is_primitive() const;   // int, long, double, ... (dims == 0)
  bool is_numeric() const;
  /// True for values whose state a method call can change through a shared
  /// reference: arrays, collections, builders, user objects. Strings, boxed
  /// primitives and big-number types are immutable.
  bool is_mutable_reference() const;
  std::string str() const;
};

struct Symbol {
  std::string name;
  TypeRef type;
  int decl_line = 0;
  bool is_param = false;
};

enum class ExprKind {
  Literal,
  Name,
  FieldAccess,
  Index,
  Call,
  NewObject,
  NewArray,
  ArrayInit,
  Unary,
  Binary,
  Assign,
  IncDec,
  Ternary,
  Cast,
  This,
};

enum class LiteralKind { Int, Float, Bool, Char, String, Null };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

/// Expression node. Operand layout by kind:
///   FieldAccess  a = object, op = field
///   Index        a = array, b = index
///   Call         a = receiver (may be null), op = method, args
///   NewObject    type, args
///   NewArray     type (element name, total dims), args = sized dims, b = initializer
///   ArrayInit    args = elements
///   Unary        op, a
///   Binary       op, a, b
///   Assign       op ("=", "+=", ...), a = target, b = value
///   IncDec       op ("++"/"--"), prefix, a
///   Ternary      a ? b : c
///   Cast         type, a
struct Expr {
  ExprKind kind = ExprKind::Literal;
  int line = 0;
  int column = 0;
  std::string op;

  LiteralKind literal = LiteralKind::Null;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  std::string string_value;  // string/char literal contents, or the spelled name
  bool is_long = false;

  SymbolId symbol = kNone;  // Name: resolved local variable, or kNone for a class qualifier
  bool prefix = false;
  TypeRef type;

  ExprPtr a, b, c;
  std::vector<ExprPtr> args;

  // Call resolution (filled after all methods are known).
  MethodId callee = kNone;
  SymbolId defines_receiver = kNone;     // receiver root mutated by this call
  std::vector<SymbolId> defines_args;    // reference arguments the call may mutate
};

enum class StmtKind {
  Import,
  ClassDecl,
  MethodDecl,  // doubles as the method's entry node
  Decl,
  Assign,
  Call,
  If,
  Loop,
  Return,
  Break,
  Continue,
  Block,
};

enum class LoopForm { While, DoWhile, For, ForEach };

struct Declarator {
  SymbolId symbol = kNone;
  ExprPtr init;
};

struct Stmt {
  StmtId id = kNone;
  StmtKind kind = StmtKind::Block;
  int line = 0;        // anchor (first) line
  int end_line = 0;    // last line of the statement's own syntax (header only for compounds)
  int column = 0;
  std::vector<int> extra_lines;  // further lines owned by this node (do-while's `while`)

  MethodId method = kNone;
  int class_index = kNone;
  StmtId parent = kNone;

  std::vector<SymbolId> defs;  // sorted, unique
  std::vector<SymbolId> uses;  // sorted, unique
  std::vector<MethodId> callees;
  std::vector<std::string> referenced_names;  // type names and class qualifiers

  ExprPtr expr;  // expression statement, condition, return value, or for-each iterable
  std::vector<Declarator> declarators;
  TypeRef decl_type;

  std::vector<StmtId> body;  // Block
  StmtId then_branch = kNone;
  StmtId else_branch = kNone;

  LoopForm loop_form = LoopForm::While;
  std::vector<StmtId> for_init;
  std::vector<StmtId> for_update;
  StmtId loop_body = kNone;

  std::string text;  // import path, class name, or method name

  /// All lines this node contributes to a line-set slice.
  std::vector<int> output_lines() const;
  bool spans(int physical_line) const;
};

struct Method {
  std::string name;
  int class_index = kNone;
  StmtId decl = kNone;
  StmtId body = kNone;
  TypeRef return_type;
  bool is_static = false;
  std::vector<SymbolId> params;
  std::vector<Symbol> symbols;
};

struct ClassInfo {
  std::string name;
  StmtId decl = kNone;
  std::vector<MethodId> methods;
};

const char* to_string(StmtKind kind);

/// Parsed compilation unit. Statements live in one arena indexed by StmtId;
/// every non-import statement belongs to exactly one class and at most one method.
struct Ast {
  SourceProgram source;
  std::vector<Stmt> stmts;
  std::vector<Method> methods;
  std::vector<ClassInfo> classes;
  std::vector<StmtId> imports;

  const Stmt& stmt(StmtId id) const { return stmts.at(static_cast<std::size_t>(id)); }
  const Method& method(MethodId id) const { return methods.at(static_cast<std::size_t>(id)); }
  const Symbol& symbol(MethodId m, SymbolId s) const {
    return method(m).symbols.at(static_cast<std::size_t>(s));
  }

  std::optional<MethodId> find_method(const std::string& name) const;
  /// The `main` method, if the program has one.
  std::optional<MethodId> main_method() const;
  /// Statement ids ordered by (line, column).
  std::vector<StmtId> textual_order() const;
  /// Names of the variables in `ids` (for diagnostics and tests).
  std::vector<std::string> names(MethodId m, const std::vector<SymbolId>& ids) const;
};

}  // namespace slicebench::frontend
