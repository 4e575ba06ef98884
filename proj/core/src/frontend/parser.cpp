#include "slicebench/frontend/parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <unordered_map>

namespace slicebench::frontend {

namespace {

constexpr std::array<std::string_view, 60> kAccessorMethods = {
    "size",       "get",        "length",      "charAt",       "isEmpty",     "contains",
    "containsKey", "containsValue", "getOrDefault", "indexOf",   "lastIndexOf", "peek",
    "peekFirst",  "peekLast",   "getFirst",    "getLast",      "first",       "last",
    "firstKey",   "lastKey",    "floorKey",    "ceilingKey",   "higherKey",   "lowerKey",
    "floor",      "ceiling",    "higher",      "lower",        "equals",      "hashCode",
    "toString",   "keySet",     "values",      "entrySet",     "substring",   "toCharArray",
    "compareTo",  "startsWith", "endsWith",    "trim",         "toUpperCase", "toLowerCase",
    "split",      "intValue",   "longValue",   "doubleValue",  "getKey",      "getValue",
    "clone",      "stream",     "iterator",    "chars",        "isDigit",     "isLetter",
    "equalsIgnoreCase", "matches", "concat",   "repeat",       "count",       "max"};

bool is_accessor(std::string_view method) {
  return std::find(kAccessorMethods.begin(), kAccessorMethods.end(), method) != kAccessorMethods.end();
}

bool is_mutating_static(std::string_view qualifier, std::string_view method) {
  if (qualifier == "Arrays") return method == "sort" || method == "fill" || method == "setAll";
  if (qualifier == "Collections") {
    return method == "sort" || method == "reverse" || method == "shuffle" || method == "swap" ||
           method == "fill" || method == "addAll";
  }
  return false;
}

constexpr std::array<std::string_view, 10> kAssignOps = {"=",  "+=", "-=", "*=", "/=",
                                                         "%=", "&=", "|=", "^=", "<<="};

struct Access {
  std::set<SymbolId> defs;
  std::set<SymbolId> uses;
  std::set<MethodId> callees;
  std::set<std::string> names;
};

SymbolId root_symbol(const Expr* e) {
  while (e) {
    switch (e->kind) {
      case ExprKind::Name: return e->symbol;
      case ExprKind::Index:
      case ExprKind::FieldAccess:
      case ExprKind::Call: e = e->a.get(); break;
      default: return kNone;
    }
  }
  return kNone;
}

void collect_type_names(const TypeRef& t, std::set<std::string>& names) {
  if (!t.name.empty() && t.name != "void") names.insert(t.name);
  for (const auto& arg : t.args) collect_type_names(arg, names);
}

void collect(const Expr* e, Access& acc) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::Name:
      if (e->symbol != kNone) {
        acc.uses.insert(e->symbol);
      } else {
        acc.names.insert(e->string_value);
      }
      return;
    case ExprKind::Assign: {
      const Expr* target = e->a.get();
      if (target->kind == ExprKind::Name) {
        acc.defs.insert(target->symbol);
        if (e->op != "=") acc.uses.insert(target->symbol);
      } else {
        collect(target, acc);  // reads the array and its indices
        if (SymbolId root = root_symbol(target); root != kNone) acc.defs.insert(root);
      }
      collect(e->b.get(), acc);
      return;
    }
    case ExprKind::IncDec: {
      collect(e->a.get(), acc);
      if (SymbolId root = root_symbol(e->a.get()); root != kNone) acc.defs.insert(root);
      return;
    }
    case ExprKind::Call:
      collect(e->a.get(), acc);
      for (const auto& arg : e->args) collect(arg.get(), acc);
      if (e->callee != kNone) acc.callees.insert(e->callee);
      if (e->defines_receiver != kNone) acc.defs.insert(e->defines_receiver);
      for (SymbolId s : e->defines_args) acc.defs.insert(s);
      return;
    case ExprKind::NewObject:
    case ExprKind::NewArray:
    case ExprKind::Cast:
      collect_type_names(e->type, acc.names);
      break;
    default:
      break;
  }
  collect(e->a.get(), acc);
  collect(e->b.get(), acc);
  collect(e->c.get(), acc);
  for (const auto& arg : e->args) collect(arg.get(), acc);
}

class Parser {
 public:
  Parser(std::string_view source, const std::string& id) : toks_(tokenize(source)) {
    ast_.source = SourceProgram(id, std::string(source));
  }

  Ast run() {
    compilation_unit();
    resolve_calls();
    compute_def_use();
    return std::move(ast_);
  }

 private:
  // ---- token helpers --------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    const std::size_t i = std::min(pos_ + k, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_line_ = t.line;
    return t;
  }
  bool at(std::string_view punct) const { return peek().is(punct); }
  bool at_word(std::string_view word) const { return peek().is_word(word); }
  bool accept(std::string_view punct) {
    if (!at(punct)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view word) {
    if (!at_word(word)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const Token& t, const std::string& message, const std::string& expected = {}) const {
    throw ParseError(t.line, t.column, message, expected);
  }
  [[noreturn]] void unexpected(const std::string& expected) const {
    const Token& t = peek();
    const std::string what = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    fail(t, "unexpected " + what, expected);
  }
  const Token& expect(std::string_view punct) {
    if (!at(punct)) unexpected("'" + std::string(punct) + "'");
    return next();
  }
  std::string expect_identifier(const std::string& what) {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier || is_java_keyword(t.text)) unexpected(what);
    next();
    return t.text;
  }

  // ---- arena helpers --------------------------------------------------------

  StmtId new_stmt(StmtKind kind, const Token& first, StmtId parent) {
    Stmt s;
    s.id = static_cast<StmtId>(ast_.stmts.size());
    s.kind = kind;
    s.line = first.line;
    s.end_line = first.line;
    s.column = first.column;
    s.method = current_method_;
    s.class_index = current_class_;
    s.parent = parent;
    ast_.stmts.push_back(std::move(s));
    return ast_.stmts.back().id;
  }
  Stmt& st(StmtId id) { return ast_.stmts[static_cast<std::size_t>(id)]; }

  Method& method() { return ast_.methods[static_cast<std::size_t>(current_method_)]; }

  SymbolId declare(const std::string& name, const TypeRef& type, const Token& at_tok, bool is_param) {
    if (name == "var" || type.name == "var") fail(at_tok, "'var' declarations are not supported");
    Symbol sym;
    sym.name = name;
    sym.type = type;
    sym.decl_line = at_tok.line;
    sym.is_param = is_param;
    auto& symbols = method().symbols;
    symbols.push_back(std::move(sym));
    const auto id = static_cast<SymbolId>(symbols.size() - 1);
    scopes_.back()[name] = id;
    return id;
  }

  SymbolId lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto f = it->find(name); f != it->end()) return f->second;
    }
    return kNone;
  }

  struct ScopeGuard {
    explicit ScopeGuard(Parser& p) : p(p) { p.scopes_.emplace_back(); }
    ~ScopeGuard() { p.scopes_.pop_back(); }
    Parser& p;
  };

  // ---- declarations ---------------------------------------------------------

  void compilation_unit() {
    if (at_word("package")) {
      while (!at(";") && peek().kind != TokenKind::End) next();
      expect(";");
    }
    while (at_word("import")) import_decl();
    while (peek().kind != TokenKind::End) {
      if (accept(";")) continue;
      type_decl();
    }
  }

  void import_decl() {
    const Token& first = next();
    std::string path;
    if (accept_word("static")) path = "static ";
    path += expect_identifier("package or type name");
    while (accept(".")) {
      if (accept("*")) {
        path += ".*";
        break;
      }
      path += "." + expect_identifier("identifier");
    }
    const Token& semi = expect(";");
    StmtId id = new_stmt(StmtKind::Import, first, kNone);
    st(id).text = path;
    st(id).end_line = semi.line;
    ast_.imports.push_back(id);
  }

  // Returns the first modifier token (or the current one when there are none).
  Token modifiers() {
    while (at("@")) {  // marker annotations only
      next();
      expect_identifier("annotation name");
      if (at("(")) fail(peek(), "annotation arguments are not supported");
    }
    Token first = peek();
    static constexpr std::array<std::string_view, 9> kMods = {
        "public", "private", "protected", "static", "final", "abstract", "strictfp", "native", "transient"};
    bool any = true;
    while (any) {
      any = false;
      for (auto m : kMods) {
        if (at_word(m)) {
          next();
          any = true;
        }
      }
      if (at_word("synchronized") && !peek(1).is("(")) {
        next();
        any = true;
      }
    }
    return first;
  }

  void type_decl() {
    Token first = modifiers();
    if (at_word("interface") || at_word("enum") || at_word("record") || at("@")) {
      fail(peek(), "'" + peek().text + "' declarations are not supported", "class");
    }
    if (!accept_word("class")) unexpected("'class'");
    const std::string name = expect_identifier("class name");
    if (at("<")) fail(peek(), "generic classes are not supported");
    if (accept_word("extends")) parse_type();
    if (accept_word("implements")) {
      parse_type();
      while (accept(",")) parse_type();
    }
    const Token& brace = expect("{");

    ClassInfo info;
    info.name = name;
    ast_.classes.push_back(info);
    current_class_ = static_cast<int>(ast_.classes.size() - 1);
    StmtId decl = new_stmt(StmtKind::ClassDecl, first, kNone);
    st(decl).text = name;
    st(decl).end_line = brace.line;
    ast_.classes.back().decl = decl;

    while (!at("}")) {
      if (peek().kind == TokenKind::End) unexpected("'}'");
      if (accept(";")) continue;
      member();
    }
    expect("}");
    current_class_ = kNone;
  }

  void member() {
    Token first = modifiers();
    if (at_word("class") || at_word("interface") || at_word("enum")) {
      fail(peek(), "nested type declarations are not supported");
    }
    if (at("{")) fail(peek(), "initializer blocks are not supported");
    if (at("<")) fail(peek(), "generic methods are not supported");
    if (peek().kind == TokenKind::Identifier && peek(1).is("(")) {
      fail(peek(), "constructors are not supported");
    }
    TypeRef ret;
    if (accept_word("void")) {
      ret.name = "void";
    } else {
      ret = parse_type();
    }
    const Token name_tok = peek();
    const std::string name = expect_identifier("member name");
    if (!at("(")) fail(name_tok, "fields are not supported; declare locals inside methods", "'('");
    method_decl(first, ret, name);
  }

  void method_decl(const Token& first, const TypeRef& ret, const std::string& name) {
    Method m;
    m.name = name;
    m.class_index = current_class_;
    m.return_type = ret;
    m.is_static = has_static_modifier(first);
    ast_.methods.push_back(std::move(m));
    current_method_ = static_cast<MethodId>(ast_.methods.size() - 1);
    ast_.classes[static_cast<std::size_t>(current_class_)].methods.push_back(current_method_);

    StmtId decl = new_stmt(StmtKind::MethodDecl, first, kNone);
    st(decl).text = name;
    method().decl = decl;

    ScopeGuard scope(*this);
    expect("(");
    if (!at(")")) {
      do {
        accept_word("final");
        TypeRef type = parse_type();
        if (at("...")) fail(peek(), "varargs parameters are not supported");
        const Token ptok = peek();
        const std::string pname = expect_identifier("parameter name");
        while (accept("[")) {
          expect("]");
          ++type.dims;
        }
        method().params.push_back(declare(pname, type, ptok, true));
      } while (accept(","));
    }
    expect(")");
    if (accept_word("throws")) {
      parse_type();
      while (accept(",")) parse_type();
    }
    if (!at("{")) unexpected("method body");
    st(decl).end_line = peek().line;
    StmtId body = block(decl);
    method().body = body;
    current_method_ = kNone;
  }

  bool has_static_modifier(const Token& first) const {
    // Scan back from the current position to the first modifier token.
    for (std::size_t i = pos_; i-- > 0;) {
      if (toks_[i].is_word("static")) return true;
      if (toks_[i].line == first.line && toks_[i].column == first.column) break;
    }
    return false;
  }

  // ---- types ----------------------------------------------------------------

  TypeRef parse_type() {
    auto t = try_type();
    if (!t) unexpected("type");
    return *t;
  }

  std::optional<TypeRef> try_type() {
    const std::size_t save = pos_;
    auto t = type_no_dims();
    if (!t) {
      pos_ = save;
      return std::nullopt;
    }
    while (at("[") && peek(1).is("]")) {
      next();
      next();
      ++t->dims;
    }
    return t;
  }

  std::optional<TypeRef> type_no_dims() {
    const Token& t = peek();
    if (t.kind != TokenKind::Identifier) return std::nullopt;
    if (is_java_keyword(t.text)) {
      static constexpr std::array<std::string_view, 8> kPrim = {"int",  "long",  "short",  "byte",
                                                                "char", "float", "double", "boolean"};
      if (std::find(kPrim.begin(), kPrim.end(), t.text) == kPrim.end()) return std::nullopt;
      next();
      TypeRef out;
      out.name = t.text;
      return out;
    }
    TypeRef out;
    out.name = next().text;
    while (at(".") && peek(1).kind == TokenKind::Identifier && !is_java_keyword(peek(1).text)) {
      next();
      out.name = next().text;
    }
    if (at("<")) {
      next();
      if (accept(">")) return out;  // diamond
      for (;;) {
        if (accept("?")) {
          if (accept_word("extends") || accept_word("super")) {
            auto bound = try_type();
            if (!bound) return std::nullopt;
            out.args.push_back(*bound);
          } else {
            out.args.push_back(TypeRef{"Object", {}, 0});
          }
        } else {
          auto arg = try_type();
          if (!arg) return std::nullopt;
          out.args.push_back(*arg);
        }
        if (accept(",")) continue;
        if (accept(">")) break;
        return std::nullopt;
      }
    }
    return out;
  }

  // ---- statements -----------------------------------------------------------

  StmtId block(StmtId parent) {
    const Token& open = expect("{");
    StmtId id = new_stmt(StmtKind::Block, open, parent);
    ScopeGuard scope(*this);
    while (!at("}")) {
      if (peek().kind == TokenKind::End) unexpected("'}'");
      StmtId child = statement(id);
      if (child != kNone) st(id).body.push_back(child);
    }
    next();
    return id;
  }

  bool looks_like_declaration() {
    const std::size_t save = pos_;
    accept_word("final");
    bool result = false;
    if (auto t = try_type()) {
      const Token& name = peek();
      if (name.kind == TokenKind::Identifier && !is_java_keyword(name.text)) {
        const Token& after = peek(1);
        result = after.is("=") || after.is(";") || after.is(",") || after.is("[") || after.is(":");
      }
    }
    pos_ = save;
    return result;
  }

  StmtId statement(StmtId parent) {
    const Token& t = peek();
    if (t.is("{")) return block(parent);
    if (t.is(";")) {
      next();
      return kNone;
    }
    if (t.kind == TokenKind::Identifier) {
      const std::string& w = t.text;
      if (w == "if") return if_stmt(parent);
      if (w == "while") return while_stmt(parent);
      if (w == "do") return do_stmt(parent);
      if (w == "for") return for_stmt(parent);
      if (w == "return") return return_stmt(parent);
      if (w == "break" || w == "continue") return jump_stmt(parent);
      if (w == "try" || w == "catch" || w == "finally") fail(t, "try/catch is not supported");
      if (w == "switch" || w == "case" || w == "default") fail(t, "switch is not supported");
      if (w == "throw" || w == "synchronized" || w == "assert" || w == "yield") {
        fail(t, "'" + w + "' statements are not supported");
      }
      if (w == "class" || w == "interface" || w == "enum") fail(t, "local type declarations are not supported");
      if (!is_java_keyword(w) && peek(1).is(":")) fail(t, "labeled statements are not supported");
      if (looks_like_declaration()) {
        StmtId id = local_decl(parent, t);
        st(id).end_line = expect(";").line;
        return id;
      }
    }
    StmtId id = expression_statement(parent);
    st(id).end_line = expect(";").line;
    return id;
  }

  StmtId local_decl(StmtId parent, const Token& first) {
    accept_word("final");
    TypeRef type = parse_type();
    StmtId id = new_stmt(StmtKind::Decl, first, parent);
    st(id).decl_type = type;
    do {
      const Token name_tok = peek();
      const std::string name = expect_identifier("variable name");
      TypeRef var_type = type;
      while (accept("[")) {
        expect("]");
        ++var_type.dims;
      }
      Declarator d;
      if (accept("=")) {
        d.init = at("{") ? array_initializer(var_type) : expression();
      }
      // Declared after the initializer so `int x = x + 1` cannot see itself.
      d.symbol = declare(name, var_type, name_tok, false);
      st(id).declarators.push_back(std::move(d));
    } while (accept(","));
    st(id).end_line = last_line_;
    return id;
  }

  StmtId expression_statement(StmtId parent) {
    const Token first = peek();
    ExprPtr e = expression();
    StmtKind kind;
    switch (e->kind) {
      case ExprKind::Assign:
      case ExprKind::IncDec: kind = StmtKind::Assign; break;
      case ExprKind::Call:
      case ExprKind::NewObject: kind = StmtKind::Call; break;
      default: fail(first, "not a statement", "assignment, increment or method call");
    }
    StmtId id = new_stmt(kind, first, parent);
    st(id).expr = std::move(e);
    st(id).end_line = last_line_;
    return id;
  }

  ExprPtr paren_condition() {
    expect("(");
    ExprPtr cond = expression();
    expect(")");
    return cond;
  }

  StmtId if_stmt(StmtId parent) {
    const Token first = next();
    StmtId id = new_stmt(StmtKind::If, first, parent);
    st(id).expr = paren_condition();
    st(id).end_line = last_line_;
    st(id).then_branch = scoped_statement(id);
    if (accept_word("else")) st(id).else_branch = scoped_statement(id);
    return id;
  }

  StmtId scoped_statement(StmtId parent) {
    ScopeGuard scope(*this);
    if (looks_like_declaration()) fail(peek(), "declaration is not allowed as a branch body");
    return statement(parent);
  }

  StmtId while_stmt(StmtId parent) {
    const Token first = next();
    StmtId id = new_stmt(StmtKind::Loop, first, parent);
    st(id).loop_form = LoopForm::While;
    st(id).expr = paren_condition();
    st(id).end_line = last_line_;
    st(id).loop_body = scoped_statement(id);
    return id;
  }

  StmtId do_stmt(StmtId parent) {
    const Token first = next();
    StmtId id = new_stmt(StmtKind::Loop, first, parent);
    st(id).loop_form = LoopForm::DoWhile;
    st(id).loop_body = scoped_statement(id);
    if (!at_word("while")) unexpected("'while'");
    const int while_line = next().line;
    st(id).expr = paren_condition();
    const int semi_line = expect(";").line;
    for (int l = while_line; l <= semi_line; ++l) {
      if (l != first.line) st(id).extra_lines.push_back(l);
    }
    return id;
  }

  StmtId for_stmt(StmtId parent) {
    const Token first = next();
    StmtId id = new_stmt(StmtKind::Loop, first, parent);
    ScopeGuard scope(*this);
    expect("(");

    // Enhanced for: `for (Type name : iterable)`.
    {
      const std::size_t save = pos_;
      accept_word("final");
      if (auto type = try_type(); type && peek().kind == TokenKind::Identifier && peek(1).is(":")) {
        const Token name_tok = next();
        next();  // ':'
        st(id).loop_form = LoopForm::ForEach;
        st(id).decl_type = *type;
        Declarator d;
        d.init = nullptr;
        st(id).expr = expression();
        d.symbol = declare(name_tok.text, *type, name_tok, false);
        st(id).declarators.push_back(std::move(d));
        expect(")");
        st(id).end_line = last_line_;
        st(id).loop_body = scoped_statement(id);
        return id;
      }
      pos_ = save;
    }

    st(id).loop_form = LoopForm::For;
    if (!at(";")) {
      if (looks_like_declaration()) {
        const Token init_tok = peek();
        StmtId init = local_decl(id, init_tok);
        st(id).for_init.push_back(init);
      } else {
        do {
          StmtId init = expression_statement(id);
          st(id).for_init.push_back(init);
        } while (accept(","));
      }
    }
    expect(";");
    if (!at(";")) st(id).expr = expression();
    expect(";");
    if (!at(")")) {
      do {
        StmtId upd = expression_statement(id);
        st(id).for_update.push_back(upd);
      } while (accept(","));
    }
    expect(")");
    st(id).end_line = last_line_;
    st(id).loop_body = scoped_statement(id);
    return id;
  }

  StmtId return_stmt(StmtId parent) {
    const Token first = next();
    StmtId id = new_stmt(StmtKind::Return, first, parent);
    if (!at(";")) st(id).expr = expression();
    st(id).end_line = expect(";").line;
    return id;
  }

  StmtId jump_stmt(StmtId parent) {
    const Token first = next();
    StmtId id = new_stmt(first.text == "break" ? StmtKind::Break : StmtKind::Continue, first, parent);
    if (peek().kind == TokenKind::Identifier) fail(peek(), "labeled jumps are not supported", "';'");
    st(id).end_line = expect(";").line;
    return id;
  }

  // ---- expressions ----------------------------------------------------------

  ExprPtr make_expr(ExprKind kind, const Token& at_tok) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = at_tok.line;
    e->column = at_tok.column;
    return e;
  }

  ExprPtr expression() { return assignment(); }

  // Recognizes an assignment operator at the cursor, consuming it.
  std::optional<std::string> assignment_operator() {
    for (auto op : kAssignOps) {
      if (at(op)) {
        next();
        return std::string(op);
      }
    }
    if (at(">") && peek(1).glued) {
      if (peek(1).is(">=")) {
        next();
        next();
        return std::string(">>=");
      }
      if (peek(1).is(">") && peek(2).glued && peek(2).is(">=")) {
        next();
        next();
        next();
        return std::string(">>>=");
      }
    }
    return std::nullopt;
  }

  ExprPtr assignment() {
    ExprPtr lhs = ternary();
    const Token op_tok = peek();
    if (auto op = assignment_operator()) {
      if (lhs->kind != ExprKind::Name && lhs->kind != ExprKind::Index) {
        fail(op_tok, "invalid assignment target");
      }
      if (lhs->kind == ExprKind::Name && lhs->symbol == kNone) {
        fail(op_tok, "assignment to undeclared variable '" + lhs->string_value + "'");
      }
      auto e = make_expr(ExprKind::Assign, op_tok);
      e->op = *op;
      e->a = std::move(lhs);
      e->b = assignment();
      return e;
    }
    return lhs;
  }

  ExprPtr ternary() {
    ExprPtr cond = binary(0);
    if (at("?")) {
      const Token q = next();
      auto e = make_expr(ExprKind::Ternary, q);
      e->a = std::move(cond);
      e->b = ternary();
      expect(":");
      e->c = ternary();
      return e;
    }
    return cond;
  }

  // Binary operator at the cursor for precedence `level`, without consuming.
  std::optional<std::pair<std::string, int>> binary_operator(int level) const {
    const Token& t = peek();
    if (t.kind != TokenKind::Punct && !t.is_word("instanceof")) return std::nullopt;
    switch (level) {
      case 0: if (t.is("||")) return std::pair{t.text, 1}; break;
      case 1: if (t.is("&&")) return std::pair{t.text, 1}; break;
      case 2: if (t.is("|")) return std::pair{t.text, 1}; break;
      case 3: if (t.is("^")) return std::pair{t.text, 1}; break;
      case 4: if (t.is("&")) return std::pair{t.text, 1}; break;
      case 5: if (t.is("==") || t.is("!=")) return std::pair{t.text, 1}; break;
      case 6:
        if (t.is_word("instanceof")) return std::pair{t.text, 1};
        if (t.is("<") || t.is("<=") || t.is(">=")) return std::pair{t.text, 1};
        if (t.is(">") && !(peek(1).glued && (peek(1).is(">") || peek(1).is(">=")))) {
          return std::pair{t.text, 1};
        }
        break;
      case 7:
        if (t.is("<<")) return std::pair{t.text, 1};
        if (t.is(">") && peek(1).glued && peek(1).is(">")) {
          if (peek(2).glued && peek(2).is(">") ) return std::pair{std::string(">>>"), 3};
          if (peek(2).glued && peek(2).is(">=")) return std::nullopt;  // >>>= assignment
          return std::pair{std::string(">>"), 2};
        }
        break;
      case 8: if (t.is("+") || t.is("-")) return std::pair{t.text, 1}; break;
      case 9: if (t.is("*") || t.is("/") || t.is("%")) return std::pair{t.text, 1}; break;
      default: break;
    }
    return std::nullopt;
  }

  ExprPtr binary(int level) {
    if (level > 9) return unary();
    ExprPtr lhs = binary(level + 1);
    while (auto op = binary_operator(level)) {
      const Token op_tok = peek();
      if (op->first == "instanceof") fail(op_tok, "instanceof is not supported");
      for (int i = 0; i < op->second; ++i) next();
      auto e = make_expr(ExprKind::Binary, op_tok);
      e->op = op->first;
      e->a = std::move(lhs);
      e->b = binary(level + 1);
      lhs = std::move(e);
    }
    return lhs;
  }

  bool at_cast() const {
    if (!at("(")) return false;
    const Token& t = peek(1);
    if (t.kind != TokenKind::Identifier) return false;
    static constexpr std::array<std::string_view, 8> kPrim = {"int",  "long",  "short",  "byte",
                                                              "char", "float", "double", "boolean"};
    if (std::find(kPrim.begin(), kPrim.end(), t.text) != kPrim.end()) return true;
    // `(Name) operand` / `(Name[]) operand` reference casts.
    if (is_java_keyword(t.text) || lookup(t.text) != kNone) return false;
    std::size_t k = 2;
    while (peek(k).is(".") && peek(k + 1).kind == TokenKind::Identifier) k += 2;
    while (peek(k).is("[") && peek(k + 1).is("]")) k += 2;
    if (!peek(k).is(")")) return false;
    const Token& after = peek(k + 1);
    return after.kind == TokenKind::Identifier || after.kind == TokenKind::StringLiteral ||
           after.kind == TokenKind::IntLiteral || after.kind == TokenKind::FloatLiteral ||
           after.kind == TokenKind::CharLiteral || after.is("(") || after.is("!");
  }

  ExprPtr unary() {
    const Token t = peek();
    if (t.is("++") || t.is("--")) {
      next();
      auto e = make_expr(ExprKind::IncDec, t);
      e->op = t.text;
      e->prefix = true;
      e->a = unary();
      check_incdec_target(*e->a, t);
      return e;
    }
    if (t.is("+") || t.is("-") || t.is("!") || t.is("~")) {
      next();
      auto e = make_expr(ExprKind::Unary, t);
      e->op = t.text;
      e->a = unary();
      return e;
    }
    if (at_cast()) {
      next();
      auto e = make_expr(ExprKind::Cast, t);
      e->type = parse_type();
      expect(")");
      e->a = unary();
      return e;
    }
    return postfix();
  }

  void check_incdec_target(const Expr& target, const Token& at_tok) const {
    if (target.kind == ExprKind::Name && target.symbol != kNone) return;
    if (target.kind == ExprKind::Index) return;
    fail(at_tok, "invalid increment/decrement target");
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    for (;;) {
      if (at(".")) {
        const Token dot = next();
        if (at("<")) fail(peek(), "explicit generic method calls are not supported");
        const Token name_tok = peek();
        const std::string name = expect_identifier("member name");
        if (at("(")) {
          auto call = make_expr(ExprKind::Call, name_tok);
          call->op = name;
          call->a = std::move(e);
          call->args = arguments();
          e = std::move(call);
        } else {
          auto fa = make_expr(ExprKind::FieldAccess, name_tok);
          fa->op = name;
          fa->a = std::move(e);
          e = std::move(fa);
        }
        (void)dot;
      } else if (at("[")) {
        const Token open = next();
        auto idx = make_expr(ExprKind::Index, open);
        idx->a = std::move(e);
        idx->b = expression();
        expect("]");
        e = std::move(idx);
      } else if (at("++") || at("--")) {
        const Token op = next();
        check_incdec_target(*e, op);
        auto inc = make_expr(ExprKind::IncDec, op);
        inc->op = op.text;
        inc->prefix = false;
        inc->a = std::move(e);
        e = std::move(inc);
      } else if (at("::")) {
        fail(peek(), "method references are not supported");
      } else {
        return e;
      }
    }
  }

  std::vector<ExprPtr> arguments() {
    expect("(");
    std::vector<ExprPtr> args;
    if (!at(")")) {
      do {
        args.push_back(expression());
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  bool paren_is_lambda() const {
    int depth = 0;
    for (std::size_t k = 0;; ++k) {
      const Token& t = peek(k);
      if (t.kind == TokenKind::End) return false;
      if (t.is("(")) ++depth;
      if (t.is(")") && --depth == 0) return peek(k + 1).is("->");
    }
  }

  ExprPtr primary() {
    const Token t = peek();
    switch (t.kind) {
      case TokenKind::IntLiteral: {
        next();
        auto e = make_expr(ExprKind::Literal, t);
        e->literal = LiteralKind::Int;
        e->is_long = t.is_long;
        std::int64_t value = 0;
        const bool hex = t.text.size() > 2 && t.text[0] == '0' && (t.text[1] == 'x' || t.text[1] == 'X');
        const char* begin = t.text.data() + (hex ? 2 : 0);
        const char* end = t.text.data() + t.text.size();
        auto [ptr, ec] = std::from_chars(begin, end, value, hex ? 16 : 10);
        if (ec != std::errc() || ptr != end) fail(t, "integer literal out of range");
        e->int_value = value;
        return e;
      }
      case TokenKind::FloatLiteral: {
        next();
        auto e = make_expr(ExprKind::Literal, t);
        e->literal = LiteralKind::Float;
        try {
          e->float_value = std::stod(t.text);
        } catch (const std::exception&) {
          fail(t, "malformed floating-point literal");
        }
        return e;
      }
      case TokenKind::CharLiteral: {
        next();
        auto e = make_expr(ExprKind::Literal, t);
        e->literal = LiteralKind::Char;
        e->string_value = t.text;
        e->int_value = static_cast<unsigned char>(t.text[0]);
        return e;
      }
      case TokenKind::StringLiteral: {
        next();
        auto e = make_expr(ExprKind::Literal, t);
        e->literal = LiteralKind::String;
        e->string_value = t.text;
        return e;
      }
      case TokenKind::End: unexpected("expression");
      default: break;
    }

    if (t.is("(")) {
      if (paren_is_lambda()) fail(t, "lambda expressions are not supported");
      next();
      ExprPtr inner = expression();
      expect(")");
      return inner;
    }
    if (t.is("{")) fail(t, "array initializer is only allowed in a declaration or after 'new'");

    if (t.kind != TokenKind::Identifier) unexpected("expression");
    if (peek(1).is("->")) fail(t, "lambda expressions are not supported");

    if (t.text == "true" || t.text == "false") {
      next();
      auto e = make_expr(ExprKind::Literal, t);
      e->literal = LiteralKind::Bool;
      e->int_value = t.text == "true";
      return e;
    }
    if (t.text == "null") {
      next();
      auto e = make_expr(ExprKind::Literal, t);
      e->literal = LiteralKind::Null;
      return e;
    }
    if (t.text == "this") {
      next();
      if (!at(".")) fail(t, "'this' is only supported as a method-call receiver");
      return make_expr(ExprKind::This, t);
    }
    if (t.text == "new") return new_expression();
    if (t.text == "super") fail(t, "'super' is not supported");
    if (t.text == "switch") fail(t, "switch is not supported");
    if (is_java_keyword(t.text)) {
      // `int.class`, `String[]::new` and friends fall outside the subset.
      unexpected("expression");
    }

    next();
    if (at("(")) {
      auto call = make_expr(ExprKind::Call, t);
      call->op = t.text;
      call->args = arguments();
      return call;
    }
    auto e = make_expr(ExprKind::Name, t);
    e->string_value = t.text;
    e->symbol = lookup(t.text);
    if (e->symbol == kNone && !at(".")) fail(t, "undeclared variable '" + t.text + "'");
    return e;
  }

  ExprPtr new_expression() {
    const Token new_tok = next();
    auto base = type_no_dims();
    if (!base) unexpected("type after 'new'");
    if (at("[")) {
      auto e = make_expr(ExprKind::NewArray, new_tok);
      e->type = *base;
      while (at("[") && !peek(1).is("]")) {
        next();
        e->args.push_back(expression());
        expect("]");
        ++e->type.dims;
      }
      while (at("[") && peek(1).is("]")) {
        next();
        next();
        ++e->type.dims;
      }
      if (e->type.dims == 0) unexpected("array dimension");
      if (at("{")) {
        if (!e->args.empty()) fail(peek(), "array creation cannot combine sizes with an initializer");
        e->b = array_initializer(e->type);
      } else if (e->args.empty()) {
        unexpected("array size or initializer");
      }
      return e;
    }
    auto e = make_expr(ExprKind::NewObject, new_tok);
    e->type = *base;
    e->args = arguments();
    if (at("{")) fail(peek(), "anonymous classes are not supported");
    return e;
  }

  ExprPtr array_initializer(const TypeRef& type) {
    const Token open = expect("{");
    auto e = make_expr(ExprKind::ArrayInit, open);
    e->type = type;
    TypeRef element = type;
    element.dims = std::max(0, element.dims - 1);
    if (!at("}")) {
      do {
        if (at("}")) break;  // trailing comma
        e->args.push_back(at("{") ? array_initializer(element) : expression());
      } while (accept(","));
    }
    expect("}");
    return e;
  }

  // ---- post passes ----------------------------------------------------------

  std::optional<int> user_class(const std::string& name) const {
    for (std::size_t i = 0; i < ast_.classes.size(); ++i) {
      if (ast_.classes[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
  }

  MethodId find_in_class(int cls, const std::string& name, std::size_t arity) const {
    for (MethodId m : ast_.classes[static_cast<std::size_t>(cls)].methods) {
      const Method& mm = ast_.method(m);
      if (mm.name == name && mm.params.size() == arity) return m;
    }
    return kNone;
  }

  void resolve_expr(Expr* e, MethodId owner) {
    if (!e) return;
    resolve_expr(e->a.get(), owner);
    resolve_expr(e->b.get(), owner);
    resolve_expr(e->c.get(), owner);
    for (auto& arg : e->args) resolve_expr(arg.get(), owner);
    if (e->kind != ExprKind::Call) return;

    const Method& m = ast_.method(owner);
    const Expr* recv = e->a.get();
    std::optional<int> target_class;
    std::string qualifier;
    if (!recv || recv->kind == ExprKind::This) {
      target_class = m.class_index;
    } else if (recv->kind == ExprKind::Name && recv->symbol == kNone) {
      qualifier = recv->string_value;
      target_class = user_class(qualifier);
    } else if (recv->kind == ExprKind::Name) {
      const TypeRef& t = m.symbols[static_cast<std::size_t>(recv->symbol)].type;
      if (t.dims == 0) target_class = user_class(t.name);
    } else if (recv->kind == ExprKind::NewObject) {
      target_class = user_class(recv->type.name);
    }

    if (target_class) {
      e->callee = find_in_class(*target_class, e->op, e->args.size());
      if (e->callee == kNone && !recv) {
        for (std::size_t c = 0; c < ast_.classes.size() && e->callee == kNone; ++c) {
          e->callee = find_in_class(static_cast<int>(c), e->op, e->args.size());
        }
      }
      if (e->callee == kNone) {
        throw ParseError(e->line, e->column,
                         "call to unknown method '" + e->op + "' with " + std::to_string(e->args.size()) +
                             " argument(s)");
      }
      for (const auto& arg : e->args) {
        if (arg->kind != ExprKind::Name || arg->symbol == kNone) continue;
        const TypeRef& t = m.symbols[static_cast<std::size_t>(arg->symbol)].type;
        if (t.is_mutable_reference() && !user_class(t.name)) e->defines_args.push_back(arg->symbol);
      }
      return;
    }

    if (!recv) {
      throw ParseError(e->line, e->column, "call to unknown method '" + e->op + "'");
    }
    if (!qualifier.empty()) {
      if (is_mutating_static(qualifier, e->op) && !e->args.empty()) {
        const Expr* first = e->args.front().get();
        if (first->kind == ExprKind::Name && first->symbol != kNone &&
            m.symbols[static_cast<std::size_t>(first->symbol)].type.is_mutable_reference()) {
          e->defines_args.push_back(first->symbol);
        }
      }
      return;
    }
    const SymbolId root = root_symbol(recv);
    if (root == kNone || is_accessor(e->op)) return;
    const TypeRef& t = m.symbols[static_cast<std::size_t>(root)].type;
    if (t.is_mutable_reference() && !(t.dims == 0 && user_class(t.name))) e->defines_receiver = root;
  }

  void resolve_calls() {
    for (auto& s : ast_.stmts) {
      if (s.method == kNone) continue;
      resolve_expr(s.expr.get(), s.method);
      for (auto& d : s.declarators) resolve_expr(d.init.get(), s.method);
    }
  }

  void compute_def_use() {
    for (auto& s : ast_.stmts) {
      Access acc;
      switch (s.kind) {
        case StmtKind::MethodDecl: {
          const Method& m = ast_.method(s.method);
          acc.defs.insert(m.params.begin(), m.params.end());
          collect_type_names(m.return_type, acc.names);
          for (SymbolId p : m.params) collect_type_names(m.symbols[static_cast<std::size_t>(p)].type, acc.names);
          break;
        }
        case StmtKind::Decl:
          collect_type_names(s.decl_type, acc.names);
          for (const auto& d : s.declarators) {
            if (!d.init) continue;
            collect(d.init.get(), acc);
            acc.defs.insert(d.symbol);
          }
          break;
        case StmtKind::Loop:
          collect(s.expr.get(), acc);
          if (s.loop_form == LoopForm::ForEach) {
            collect_type_names(s.decl_type, acc.names);
            acc.defs.insert(s.declarators.front().symbol);
          }
          break;
        case StmtKind::Assign:
        case StmtKind::Call:
        case StmtKind::If:
        case StmtKind::Return:
          collect(s.expr.get(), acc);
          break;
        default:
          break;
      }
      s.defs.assign(acc.defs.begin(), acc.defs.end());
      s.uses.assign(acc.uses.begin(), acc.uses.end());
      s.callees.assign(acc.callees.begin(), acc.callees.end());
      s.referenced_names.assign(acc.names.begin(), acc.names.end());
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int last_line_ = 1;
  Ast ast_;
  std::vector<std::unordered_map<std::string, SymbolId>> scopes_;
  MethodId current_method_ = kNone;
  int current_class_ = kNone;
};

}  // namespace

Ast parse_program(std::string_view source, const std::string& id) { return Parser(source, id).run(); }

std::vector<StmtId> statements_at(const Ast& ast, int line) {
  std::vector<StmtId> out;
  for (StmtId id : ast.textual_order()) {
    if (ast.stmt(id).spans(line)) out.push_back(id);
  }
  return out;
}

StmtId statement_at(const Ast& ast, int line) {
  auto found = statements_at(ast, line);
  if (found.empty()) throw NotFound("no statement at line " + std::to_string(line));
  return found.front();
}

}  // namespace slicebench::frontend
