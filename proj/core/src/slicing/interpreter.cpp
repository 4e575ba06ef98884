#include "slicebench/slicing/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <json.hpp>
#include <unordered_map>

#include "slicebench/slicing/value.hpp"

namespace slicebench::slicing {

using frontend::Ast;
using frontend::Expr;
using frontend::ExprKind;
using frontend::LiteralKind;
using frontend::LoopForm;
using frontend::MethodId;
using frontend::Stmt;
using frontend::StmtId;
using frontend::StmtKind;
using frontend::SymbolId;
using frontend::TypeRef;
using frontend::kNone;

namespace {

enum class Flow { Normal, Break, Continue, Return };

struct Frame {
  MethodId method = kNone;
  std::vector<Value> vars;
  std::vector<std::int64_t> last_def;
  std::unordered_map<StmtId, std::int64_t> last_instance;
  std::int64_t entry_seq = -1;
  Value ret;
  std::int64_t ret_seq = -1;
};

struct StmtCtx {
  StmtId stmt = kNone;
  std::vector<TraceUse> reads;
  std::vector<SymbolId> defs;
};

using Args = std::vector<Value>;

bool is_int_name(const std::string& n) { return n == "int" || n == "long" || n == "short" || n == "byte"; }
bool is_real_name(const std::string& n) { return n == "double" || n == "float"; }

Value default_value(const std::string& type_name, int remaining_dims) {
  if (remaining_dims > 0) return Value::null();
  if (is_int_name(type_name)) return Value::integer(0);
  if (is_real_name(type_name)) return Value::real(0.0);
  if (type_name == "char") return Value::character(0);
  if (type_name == "boolean") return Value::boolean(false);
  return Value::null();
}

std::shared_ptr<Object> new_object(ObjKind kind, std::string type_name) {
  auto o = std::make_shared<Object>();
  o->kind = kind;
  o->type_name = std::move(type_name);
  return o;
}

class Interpreter {
 public:
  Interpreter(const Ast& ast, const flow::Pdg& pdg, const ExecuteOptions& options)
      : ast_(ast), options_(options), cd_parents_(ast.stmts.size()) {
    for (const auto& e : pdg.edges) {
      if (e.kind == flow::DepKind::Control) cd_parents_[static_cast<std::size_t>(e.to)].push_back(e.from);
    }
  }

  ExecutionTrace run() {
    const auto main = ast_.main_method();
    if (!main) throw Error("NoMain", "program has no main method");
    const auto& m = ast_.method(*main);
    Args args;
    for (SymbolId p : m.params) {
      const TypeRef& t = m.symbols[static_cast<std::size_t>(p)].type;
      if (t.dims > 0) {
        auto arr = new_object(ObjKind::Array, t.name);
        arr->elem_dims = t.dims - 1;
        args.push_back(Value::object(arr));
      } else {
        args.push_back(default_value(t.name, 0));
      }
    }
    enter(*main, args, {}, -1);
    const Flow f = exec(m.body);
    (void)f;
    trace_.return_value = display(frames_.back().ret);
    frames_.pop_back();
    return std::move(trace_);
  }

 private:
  // ---- bookkeeping ----------------------------------------------------------

  [[noreturn]] void fail(const std::string& message, int line) const {
    throw RuntimeError(message, line, static_cast<std::int64_t>(trace_.entries.size()));
  }

  Frame& frame() { return frames_.back(); }
  StmtCtx& ctx() { return ctxs_.back(); }

  const TypeRef& symbol_type(SymbolId s) const {
    return ast_.method(frames_.back().method).symbols[static_cast<std::size_t>(s)].type;
  }
  const std::string& symbol_name(SymbolId s) const {
    return ast_.method(frames_.back().method).symbols[static_cast<std::size_t>(s)].name;
  }

  std::int64_t control_parent(StmtId s) {
    const Frame& f = frame();
    for (StmtId cur = s; cur != kNone; cur = ast_.stmt(cur).parent) {
      std::int64_t best = -1;
      for (StmtId p : cd_parents_[static_cast<std::size_t>(cur)]) {
        if (auto it = f.last_instance.find(p); it != f.last_instance.end()) best = std::max(best, it->second);
      }
      if (best >= 0) return best;
    }
    return f.entry_seq;
  }

  void count_step() {
    if (++steps_ > options_.step_budget) throw StepBudgetExceeded(options_.step_budget);
  }

  static std::vector<TraceUse> dedupe(std::vector<TraceUse> uses) {
    std::vector<TraceUse> out;
    for (auto& u : uses) {
      if (u.seq < 0) continue;
      if (std::find(out.begin(), out.end(), u) == out.end()) out.push_back(std::move(u));
    }
    return out;
  }

  /// Completes the current statement instance and pops its context.
  std::int64_t emit() {
    count_step();
    StmtCtx c = std::move(ctxs_.back());
    ctxs_.pop_back();
    const Stmt& s = ast_.stmt(c.stmt);
    TraceEntry e;
    e.seq = static_cast<std::int64_t>(trace_.entries.size());
    e.line = s.line;
    e.stmt = c.stmt;
    e.method = frame().method;
    e.uses = dedupe(std::move(c.reads));
    e.control_parent = control_parent(c.stmt);
    std::vector<SymbolId> seen;
    for (SymbolId d : c.defs) {
      if (std::find(seen.begin(), seen.end(), d) != seen.end()) continue;
      seen.push_back(d);
      e.defs.push_back({symbol_name(d), display(frame().vars[static_cast<std::size_t>(d)])});
      frame().last_def[static_cast<std::size_t>(d)] = e.seq;
    }
    frame().last_instance[c.stmt] = e.seq;
    trace_.entries.push_back(std::move(e));
    return trace_.entries.back().seq;
  }

  void begin(StmtId s) { ctxs_.push_back(StmtCtx{s, {}, {}}); }

  void enter(MethodId method, const Args& args, std::vector<TraceUse> arg_reads, std::int64_t parent) {
    count_step();
    const auto& m = ast_.method(method);
    Frame f;
    f.method = method;
    f.vars.resize(m.symbols.size());
    f.last_def.assign(m.symbols.size(), -1);
    TraceEntry e;
    e.seq = static_cast<std::int64_t>(trace_.entries.size());
    e.line = ast_.stmt(m.decl).line;
    e.stmt = m.decl;
    e.method = method;
    e.uses = dedupe(std::move(arg_reads));
    e.control_parent = parent;
    for (std::size_t k = 0; k < m.params.size(); ++k) {
      const SymbolId p = m.params[k];
      const auto& sym = m.symbols[static_cast<std::size_t>(p)];
      f.vars[static_cast<std::size_t>(p)] = coerce(args.at(k), sym.type, e.line);
      f.last_def[static_cast<std::size_t>(p)] = e.seq;
      e.defs.push_back({sym.name, display(f.vars[static_cast<std::size_t>(p)])});
    }
    f.entry_seq = e.seq;
    f.last_instance[m.decl] = e.seq;
    trace_.entries.push_back(std::move(e));
    frames_.push_back(std::move(f));
  }

  Value read_var(SymbolId s) {
    ctx().reads.push_back({symbol_name(s), frame().last_def[static_cast<std::size_t>(s)]});
    return frame().vars[static_cast<std::size_t>(s)];
  }

  void write_var(SymbolId s, const Value& v, int line) {
    frame().vars[static_cast<std::size_t>(s)] = coerce(v, symbol_type(s), line);
    ctx().defs.push_back(s);
  }

  // ---- conversions ------------------------------------------------------------

  Value coerce(const Value& v, const TypeRef& t, int line) const {
    if (t.dims > 0 || !t.is_primitive()) return v;
    return coerce_primitive(v, t.name, line);
  }

  Value coerce_primitive(const Value& v, const std::string& name, int line) const {
    if (v.is_null()) fail("null value used as " + name, line);
    if (is_int_name(name)) {
      if (v.tag == Value::Tag::Double) return Value::integer(static_cast<std::int64_t>(v.d));
      if (v.tag == Value::Tag::Int || v.tag == Value::Tag::Char) return Value::integer(v.i);
    } else if (is_real_name(name)) {
      if (v.is_numeric()) return Value::real(v.as_double());
    } else if (name == "char") {
      if (v.tag == Value::Tag::Double) return Value::character(static_cast<std::int64_t>(v.d));
      if (v.tag == Value::Tag::Int || v.tag == Value::Tag::Char) return Value::character(v.i);
    } else if (name == "boolean") {
      if (v.tag == Value::Tag::Bool) return v;
    }
    fail("cannot convert " + display(v) + " to " + name, line);
  }

  std::int64_t to_int(const Value& v, int line) const {
    if (v.tag == Value::Tag::Int || v.tag == Value::Tag::Char) return v.i;
    if (v.is_null()) fail("null value where a number was expected", line);
    fail("expected an integer, got " + display(v), line);
  }

  double to_real(const Value& v, int line) const {
    if (v.is_numeric()) return v.as_double();
    if (v.is_null()) fail("null value where a number was expected", line);
    fail("expected a number, got " + display(v), line);
  }

  bool truthy(const Value& v, int line) const {
    if (v.tag != Value::Tag::Bool) fail("condition is not a boolean", line);
    return v.i != 0;
  }

  Object& as_object(const Value& v, int line) const {
    if (v.is_null()) fail("null dereference", line);
    if (v.tag != Value::Tag::Ref) fail("not an object: " + display(v), line);
    return *v.ref;
  }

  // ---- statements -------------------------------------------------------------

  Flow exec(StmtId id) {
    if (id == kNone) return Flow::Normal;
    const Stmt& s = ast_.stmt(id);
    switch (s.kind) {
      case StmtKind::Block:
        for (StmtId c : s.body) {
          const Flow f = exec(c);
          if (f != Flow::Normal) return f;
        }
        return Flow::Normal;
      case StmtKind::Decl:
        begin(id);
        for (const auto& d : s.declarators) {
          if (d.init) {
            const Value v = eval_init(*d.init, symbol_type(d.symbol));
            write_var(d.symbol, v, s.line);
          } else {
            frame().vars[static_cast<std::size_t>(d.symbol)] = Value::null();
          }
        }
        emit();
        return Flow::Normal;
      case StmtKind::Assign:
      case StmtKind::Call:
        begin(id);
        eval(*s.expr);
        emit();
        return Flow::Normal;
      case StmtKind::If: {
        begin(id);
        const bool c = truthy(eval(*s.expr), s.line);
        emit();
        return exec(c ? s.then_branch : s.else_branch);
      }
      case StmtKind::Return: {
        begin(id);
        Value v;
        if (s.expr) v = coerce(eval(*s.expr), ast_.method(s.method).return_type, s.line);
        const std::int64_t seq = emit();
        frame().ret = std::move(v);
        frame().ret_seq = seq;
        return Flow::Return;
      }
      case StmtKind::Break:
        begin(id);
        emit();
        return Flow::Break;
      case StmtKind::Continue:
        begin(id);
        emit();
        return Flow::Continue;
      case StmtKind::Loop:
        return exec_loop(s);
      default:
        throw InternalError(std::string("cannot execute ") + frontend::to_string(s.kind));
    }
  }

  /// Returns true when the loop must stop, storing the propagated flow.
  static bool after_body(Flow f, Flow& result) {
    if (f == Flow::Break) {
      result = Flow::Normal;
      return true;
    }
    if (f == Flow::Return) {
      result = Flow::Return;
      return true;
    }
    return false;
  }

  bool guard(const Stmt& s) {
    begin(s.id);
    const bool c = s.expr ? truthy(eval(*s.expr), s.line) : true;
    emit();
    return c;
  }

  Flow exec_loop(const Stmt& s) {
    Flow result = Flow::Normal;
    switch (s.loop_form) {
      case LoopForm::While:
        while (guard(s)) {
          if (after_body(exec(s.loop_body), result)) break;
        }
        return result;
      case LoopForm::DoWhile:
        for (;;) {
          if (after_body(exec(s.loop_body), result)) break;
          if (!guard(s)) break;
        }
        return result;
      case LoopForm::For:
        for (StmtId init : s.for_init) exec(init);
        while (guard(s)) {
          if (after_body(exec(s.loop_body), result)) break;
          for (StmtId upd : s.for_update) exec(upd);
        }
        return result;
      case LoopForm::ForEach:
        return exec_foreach(s);
    }
    return result;
  }

  Flow exec_foreach(const Stmt& s) {
    begin(s.id);
    const Value coll = eval(*s.expr);
    std::vector<TraceUse> reads = ctx().reads;
    ctxs_.pop_back();

    std::vector<Value> items;
    if (coll.tag == Value::Tag::Ref) {
      const Object& o = *coll.ref;
      switch (o.kind) {
        case ObjKind::Set: items.assign(o.set.begin(), o.set.end()); break;
        case ObjKind::Map: fail("cannot iterate a map directly; use keySet() or entrySet()", s.line);
        case ObjKind::StringBuilder:
        case ObjKind::User: fail("value is not iterable", s.line);
        default: items = o.items; break;
      }
    } else {
      fail("value is not iterable: " + display(coll), s.line);
    }

    const SymbolId var = s.declarators.front().symbol;
    Flow result = Flow::Normal;
    for (const Value& item : items) {
      begin(s.id);
      ctx().reads = reads;
      write_var(var, item, s.line);
      emit();
      if (after_body(exec(s.loop_body), result)) return result;
    }
    begin(s.id);
    ctx().reads = reads;
    emit();
    return result;
  }

  // ---- expressions ------------------------------------------------------------

  Value eval_init(const Expr& e, const TypeRef& type) {
    if (e.kind == ExprKind::ArrayInit) return array_init(e, type.name, type.dims);
    return eval(e);
  }

  Value array_init(const Expr& e, const std::string& elem, int dims) {
    auto arr = new_object(ObjKind::Array, elem);
    arr->elem_dims = dims - 1;
    for (const auto& item : e.args) {
      if (item->kind == ExprKind::ArrayInit) {
        arr->items.push_back(array_init(*item, elem, dims - 1));
      } else {
        Value v = eval(*item);
        if (arr->elem_dims == 0) v = coerce(v, TypeRef{elem, {}, 0}, item->line);
        arr->items.push_back(std::move(v));
      }
    }
    return Value::object(arr);
  }

  Value make_array(const std::string& elem, const std::vector<std::int64_t>& sizes, std::size_t k, int total, int line) {
    const std::int64_t n = sizes[k];
    if (n < 0) fail("negative array size " + std::to_string(n), line);
    if (n > 50'000'000) fail("array too large", line);
    auto arr = new_object(ObjKind::Array, elem);
    arr->elem_dims = total - static_cast<int>(k) - 1;
    arr->items.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      if (k + 1 < sizes.size()) {
        arr->items.push_back(make_array(elem, sizes, k + 1, total, line));
      } else {
        arr->items.push_back(default_value(elem, arr->elem_dims));
      }
    }
    return Value::object(arr);
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Literal:
        switch (e.literal) {
          case LiteralKind::Int: return Value::integer(e.int_value);
          case LiteralKind::Float: return Value::real(e.float_value);
          case LiteralKind::Bool: return Value::boolean(e.int_value != 0);
          case LiteralKind::Char: return Value::character(e.int_value);
          case LiteralKind::String: return Value::string(e.string_value);
          case LiteralKind::Null: return Value::null();
        }
        break;
      case ExprKind::Name:
        if (e.symbol == kNone) fail("'" + e.string_value + "' is not a value", e.line);
        return read_var(e.symbol);
      case ExprKind::FieldAccess: return field(e);
      case ExprKind::Index: {
        const Value arr = eval(*e.a);
        const std::int64_t i = to_int(eval(*e.b), e.line);
        return element(arr, i, e.line);
      }
      case ExprKind::Call: return call(e);
      case ExprKind::NewObject: return construct(e);
      case ExprKind::NewArray: {
        if (e.b) return array_init(*e.b, e.type.name, e.type.dims);
        std::vector<std::int64_t> sizes;
        for (const auto& d : e.args) sizes.push_back(to_int(eval(*d), e.line));
        return make_array(e.type.name, sizes, 0, e.type.dims, e.line);
      }
      case ExprKind::ArrayInit: fail("array initializer outside a declaration", e.line);
      case ExprKind::Unary: return unary(e.op, eval(*e.a), e.line);
      case ExprKind::Binary: {
        if (e.op == "&&") {
          if (!truthy(eval(*e.a), e.line)) return Value::boolean(false);
          return Value::boolean(truthy(eval(*e.b), e.line));
        }
        if (e.op == "||") {
          if (truthy(eval(*e.a), e.line)) return Value::boolean(true);
          return Value::boolean(truthy(eval(*e.b), e.line));
        }
        const Value a = eval(*e.a);
        const Value b = eval(*e.b);
        return binary(e.op, a, b, e.line);
      }
      case ExprKind::Assign: return assign(e);
      case ExprKind::IncDec: return incdec(e);
      case ExprKind::Ternary:
        return truthy(eval(*e.a), e.line) ? eval(*e.b) : eval(*e.c);
      case ExprKind::Cast: {
        const Value v = eval(*e.a);
        if (e.type.dims == 0 && e.type.is_primitive()) return coerce_primitive(v, e.type.name, e.line);
        return v;
      }
      case ExprKind::This: return Value::object(new_object(ObjKind::User, "this"));
    }
    fail("unsupported expression", e.line);
  }

  Value& element_ref(const Value& arr, std::int64_t i, int line) {
    Object& o = as_object(arr, line);
    if (o.kind != ObjKind::Array) fail("indexing a non-array value", line);
    if (i < 0 || i >= static_cast<std::int64_t>(o.items.size())) {
      fail("index " + std::to_string(i) + " out of bounds for length " + std::to_string(o.items.size()), line);
    }
    return o.items[static_cast<std::size_t>(i)];
  }

  Value element(const Value& arr, std::int64_t i, int line) { return element_ref(arr, i, line); }

  Value coerce_element(const Value& arr, const Value& v, int line) const {
    const Object& o = *arr.ref;
    if (o.elem_dims > 0) return v;
    return coerce(v, TypeRef{o.type_name, {}, 0}, line);
  }

  /// Evaluates an lvalue's location once; returns (array, index) for elements.
  struct Place {
    SymbolId var = kNone;
    Value array;
    std::int64_t index = 0;
  };

  Place place(const Expr& target) {
    Place p;
    if (target.kind == ExprKind::Name) {
      p.var = target.symbol;
      return p;
    }
    p.array = eval(*target.a);
    p.index = to_int(eval(*target.b), target.line);
    element_ref(p.array, p.index, target.line);  // bounds check before the value is computed
    return p;
  }

  SymbolId root_of(const Expr& target) const {
    const Expr* e = &target;
    while (e->kind == ExprKind::Index) e = e->a.get();
    return e->kind == ExprKind::Name ? e->symbol : kNone;
  }

  Value load(const Place& p, int line) {
    if (p.var != kNone) return read_var(p.var);
    return element(p.array, p.index, line);
  }

  void store(const Place& p, const Expr& target, const Value& v, int line) {
    if (p.var != kNone) {
      write_var(p.var, v, line);
      return;
    }
    element_ref(p.array, p.index, line) = coerce_element(p.array, v, line);
    if (SymbolId root = root_of(target); root != kNone) ctx().defs.push_back(root);
  }

  Value assign(const Expr& e) {
    const Place p = place(*e.a);
    Value v;
    if (e.op == "=") {
      v = eval(*e.b);
    } else {
      const Value old = load(p, e.line);
      const Value rhs = eval(*e.b);
      v = binary(e.op.substr(0, e.op.size() - 1), old, rhs, e.line);
    }
    store(p, *e.a, v, e.line);
    return p.var != kNone ? frame().vars[static_cast<std::size_t>(p.var)] : element(p.array, p.index, e.line);
  }

  Value incdec(const Expr& e) {
    const Place p = place(*e.a);
    const Value old = load(p, e.line);
    const Value next = binary(e.op == "++" ? "+" : "-", old, Value::integer(1), e.line);
    store(p, *e.a, next, e.line);
    const Value now = p.var != kNone ? frame().vars[static_cast<std::size_t>(p.var)] : element(p.array, p.index, e.line);
    return e.prefix ? now : old;
  }

  Value unary(const std::string& op, const Value& v, int line) const {
    if (op == "!") return Value::boolean(!truthy(v, line));
    if (op == "~") return Value::integer(~to_int(v, line));
    if (v.tag == Value::Tag::Double) return Value::real(op == "-" ? -v.d : v.d);
    const std::int64_t i = to_int(v, line);
    return Value::integer(op == "-" ? -i : i);
  }

  Value binary(const std::string& op, const Value& a, const Value& b, int line) const {
    if (op == "+" && (a.tag == Value::Tag::Str || b.tag == Value::Tag::Str)) {
      return Value::string(display(a) + display(b));
    }
    if (op == "==" || op == "!=") {
      bool eq;
      if (a.is_numeric() && b.is_numeric()) {
        eq = (a.tag == Value::Tag::Double || b.tag == Value::Tag::Double) ? a.as_double() == b.as_double() : a.i == b.i;
      } else if (a.tag == Value::Tag::Ref || b.tag == Value::Tag::Ref) {
        eq = a.tag == b.tag && a.ref == b.ref;
      } else {
        eq = values_equal(a, b);
      }
      return Value::boolean(op == "==" ? eq : !eq);
    }
    if ((op == "&" || op == "|" || op == "^") && a.tag == Value::Tag::Bool && b.tag == Value::Tag::Bool) {
      const bool x = a.i != 0, y = b.i != 0;
      return Value::boolean(op == "&" ? (x && y) : op == "|" ? (x || y) : (x != y));
    }
    if (!a.is_numeric() || !b.is_numeric()) {
      fail("operator " + op + " needs numbers, got " + display(a) + " and " + display(b), line);
    }
    const bool real = a.tag == Value::Tag::Double || b.tag == Value::Tag::Double;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") {
      const double x = a.as_double(), y = b.as_double();
      if (!real) {
        const auto xi = a.i, yi = b.i;
        return Value::boolean(op == "<" ? xi < yi : op == ">" ? xi > yi : op == "<=" ? xi <= yi : xi >= yi);
      }
      return Value::boolean(op == "<" ? x < y : op == ">" ? x > y : op == "<=" ? x <= y : x >= y);
    }
    if (real && (op == "+" || op == "-" || op == "*" || op == "/" || op == "%")) {
      const double x = a.as_double(), y = b.as_double();
      if (op == "+") return Value::real(x + y);
      if (op == "-") return Value::real(x - y);
      if (op == "*") return Value::real(x * y);
      if (op == "/") return Value::real(x / y);
      return Value::real(std::fmod(x, y));
    }
    const std::int64_t x = to_int(a, line), y = to_int(b, line);
    if (op == "+") return Value::integer(x + y);
    if (op == "-") return Value::integer(x - y);
    if (op == "*") return Value::integer(x * y);
    if (op == "/" || op == "%") {
      if (y == 0) fail("division by zero", line);
      return Value::integer(op == "/" ? x / y : x % y);
    }
    if (op == "&") return Value::integer(x & y);
    if (op == "|") return Value::integer(x | y);
    if (op == "^") return Value::integer(x ^ y);
    if (op == "<<") return Value::integer(static_cast<std::int64_t>(static_cast<std::uint64_t>(x) << (y & 63)));
    if (op == ">>") return Value::integer(x >> (y & 63));
    if (op == ">>>") return Value::integer(static_cast<std::int64_t>(static_cast<std::uint64_t>(x) >> (y & 63)));
    fail("unsupported operator " + op, line);
  }

  bool is_qualifier(const Expr* e, const char* name = nullptr) const {
    return e && e->kind == ExprKind::Name && e->symbol == kNone && (!name || e->string_value == name);
  }

  Value field(const Expr& e) {
    if (is_qualifier(e.a.get())) {
      const std::string q = e.a->string_value + "." + e.op;
      if (q == "Integer.MAX_VALUE") return Value::integer(2147483647);
      if (q == "Integer.MIN_VALUE") return Value::integer(-2147483648LL);
      if (q == "Long.MAX_VALUE") return Value::integer(INT64_MAX);
      if (q == "Long.MIN_VALUE") return Value::integer(INT64_MIN);
      if (q == "Double.MAX_VALUE") return Value::real(1.7976931348623157e308);
      if (q == "BigDecimal.ZERO") return Value::real(0.0);
      if (q == "BigDecimal.ONE") return Value::real(1.0);
      if (q == "BigDecimal.TEN") return Value::real(10.0);
      if (q == "Math.PI") return Value::real(M_PI);
      if (q == "Math.E") return Value::real(M_E);
      fail("unsupported static field " + q, e.line);
    }
    const Value obj = eval(*e.a);
    if (e.op == "length" && obj.tag == Value::Tag::Ref && obj.ref->kind == ObjKind::Array) {
      return Value::integer(static_cast<std::int64_t>(obj.ref->items.size()));
    }
    fail("unsupported field access ." + e.op, e.line);
  }

  // ---- calls --------------------------------------------------------------------

  Value call(const Expr& e) {
    const Expr* recv = e.a.get();
    if (e.callee != kNone) {
      if (recv && !is_qualifier(recv) && recv->kind != ExprKind::This) eval(*recv);
      const std::size_t mark = ctx().reads.size();
      Args args;
      for (const auto& a : e.args) args.push_back(eval(*a));
      return invoke(e, args, mark);
    }
    if (recv && recv->kind == ExprKind::FieldAccess && is_qualifier(recv->a.get(), "System")) {
      for (const auto& a : e.args) eval(*a);  // printing is a no-op that still reads its arguments
      return Value::null();
    }
    if (is_qualifier(recv)) {
      Args args;
      for (const auto& a : e.args) args.push_back(eval(*a));
      Value out = static_call(recv->string_value, e.op, args, e.line);
      for (SymbolId s : e.defines_args) ctx().defs.push_back(s);
      return out;
    }
    const Value r = eval(*recv);
    Args args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    Value out = method_call(r, e.op, args, e.line);
    if (e.defines_receiver != kNone) ctx().defs.push_back(e.defines_receiver);
    return out;
  }

  Value invoke(const Expr& e, const Args& args, std::size_t mark) {
    if (static_cast<int>(frames_.size()) >= options_.max_call_depth) fail("call depth limit exceeded", e.line);
    const auto& m = ast_.method(e.callee);
    const std::size_t caller_ctx = ctxs_.size() - 1;
    std::vector<TraceUse> arg_reads(ctxs_[caller_ctx].reads.begin() + static_cast<std::ptrdiff_t>(mark),
                                    ctxs_[caller_ctx].reads.end());
    const std::int64_t parent = control_parent(ctxs_[caller_ctx].stmt);
    enter(e.callee, args, std::move(arg_reads), parent);
    exec(m.body);
    Frame done = std::move(frames_.back());
    frames_.pop_back();

    StmtCtx& c = ctxs_[caller_ctx];
    if (m.return_type.name != "void") {
      if (done.ret_seq < 0) fail("method '" + m.name + "' finished without returning a value", e.line);
      c.reads.push_back({"<ret>", done.ret_seq});
    }
    for (std::size_t k = 0; k < e.args.size(); ++k) {
      const Expr& arg = *e.args[k];
      if (arg.kind != ExprKind::Name) continue;
      if (std::find(e.defines_args.begin(), e.defines_args.end(), arg.symbol) == e.defines_args.end()) continue;
      const SymbolId p = m.params[k];
      const std::int64_t last = done.last_def[static_cast<std::size_t>(p)];
      if (last == done.entry_seq) continue;
      c.reads.push_back({"<out:" + m.symbols[static_cast<std::size_t>(p)].name + ">", last});
      c.defs.push_back(arg.symbol);
    }
    return done.ret;
  }

  Value construct(const Expr& e) {
    Args args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    const std::string& t = e.type.name;
    auto copy_items = [&](Object& o) {
      if (args.empty() || args[0].tag != Value::Tag::Ref) return;
      const Object& src = *args[0].ref;
      if (src.kind == ObjKind::Set) {
        o.items.assign(src.set.begin(), src.set.end());
      } else if (src.kind != ObjKind::Map) {
        o.items = src.items;
      }
    };
    if (t == "ArrayList" || t == "LinkedList" || t == "ArrayDeque" || t == "Stack" || t == "Vector") {
      const ObjKind kind = t == "ArrayList" || t == "Vector" ? ObjKind::List : t == "Stack" ? ObjKind::Stack : ObjKind::Deque;
      auto o = new_object(kind, t);
      copy_items(*o);
      return Value::object(o);
    }
    if (t == "PriorityQueue") {
      auto o = new_object(ObjKind::PriorityQueue, t);
      if (!args.empty() && args[0].tag == Value::Tag::Ref && args[0].ref->type_name == "ReverseOrder") {
        o->reverse_order = true;
      } else {
        copy_items(*o);
        sort_pq(*o);
      }
      return Value::object(o);
    }
    if (t == "HashMap" || t == "TreeMap") {
      auto o = new_object(ObjKind::Map, t);
      if (!args.empty() && args[0].tag == Value::Tag::Ref && args[0].ref->kind == ObjKind::Map) o->map = args[0].ref->map;
      return Value::object(o);
    }
    if (t == "HashSet" || t == "TreeSet") {
      auto o = new_object(ObjKind::Set, t);
      if (!args.empty() && args[0].tag == Value::Tag::Ref) {
        const Object& src = *args[0].ref;
        if (src.kind == ObjKind::Set) o->set = src.set;
        else o->set.insert(src.items.begin(), src.items.end());
      }
      return Value::object(o);
    }
    if (t == "StringBuilder") {
      auto o = new_object(ObjKind::StringBuilder, t);
      if (!args.empty() && args[0].tag == Value::Tag::Str) o->text = args[0].s;
      return Value::object(o);
    }
    if (t == "String") {
      if (args.empty()) return Value::string("");
      if (args[0].tag == Value::Tag::Str) return Value::string(args[0].s);
      if (args[0].tag == Value::Tag::Ref && args[0].ref->kind == ObjKind::Array) {
        std::string out;
        for (const auto& c : args[0].ref->items) out += display(c);
        return Value::string(out);
      }
    }
    if (t == "BigDecimal") {
      if (args.size() == 1 && args[0].tag == Value::Tag::Str) return Value::real(std::stod(args[0].s));
      if (args.size() == 1) return Value::real(to_real(args[0], e.line));
    }
    for (const auto& c : ast_.classes) {
      if (c.name == t) return Value::object(new_object(ObjKind::User, t));
    }
    fail("unsupported type '" + t + "'", e.line);
  }

  void sort_pq(Object& o) const {
    ValueLess less;
    if (o.reverse_order) {
      std::stable_sort(o.items.begin(), o.items.end(), [&](const Value& a, const Value& b) { return less(b, a); });
    } else {
      std::stable_sort(o.items.begin(), o.items.end(), less);
    }
  }

  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }
  static std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }

  Value list_of(std::vector<Value> items) const {
    auto o = new_object(ObjKind::List, "ArrayList");
    o->items = std::move(items);
    return Value::object(o);
  }

  void need(const Args& args, std::size_t n, const std::string& name, int line) const {
    if (args.size() != n) {
      fail(name + " expects " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()), line);
    }
  }

  Value static_call(const std::string& q, const std::string& m, Args& args, int line) {
    const std::string name = q + "." + m;
    auto num_pair = [&](auto fi, auto fd) {
      need(args, 2, name, line);
      if (args[0].tag == Value::Tag::Double || args[1].tag == Value::Tag::Double) {
        return Value::real(fd(to_real(args[0], line), to_real(args[1], line)));
      }
      return Value::integer(fi(to_int(args[0], line), to_int(args[1], line)));
    };
    if (q == "Math") {
      if (m == "max") return num_pair([](auto a, auto b) { return std::max(a, b); }, [](double a, double b) { return std::max(a, b); });
      if (m == "min") return num_pair([](auto a, auto b) { return std::min(a, b); }, [](double a, double b) { return std::min(a, b); });
      if (m == "abs") {
        need(args, 1, name, line);
        if (args[0].tag == Value::Tag::Double) return Value::real(std::fabs(args[0].d));
        return Value::integer(std::llabs(to_int(args[0], line)));
      }
      if (m == "floorDiv" || m == "floorMod") {
        need(args, 2, name, line);
        const std::int64_t x = to_int(args[0], line), y = to_int(args[1], line);
        if (y == 0) fail("division by zero", line);
        std::int64_t d = x / y;
        if ((x % y != 0) && ((x < 0) != (y < 0))) --d;
        return Value::integer(m == "floorDiv" ? d : x - d * y);
      }
      if (m == "round") {
        need(args, 1, name, line);
        return Value::integer(static_cast<std::int64_t>(std::floor(to_real(args[0], line) + 0.5)));
      }
      if (m == "random") fail("Math.random is not supported (executions must be deterministic)", line);
      static const std::unordered_map<std::string, double (*)(double)> kUnary = {
          {"sqrt", [](double x) { return std::sqrt(x); }}, {"floor", [](double x) { return std::floor(x); }},
          {"ceil", [](double x) { return std::ceil(x); }}, {"log", [](double x) { return std::log(x); }},
          {"log10", [](double x) { return std::log10(x); }}, {"exp", [](double x) { return std::exp(x); }},
          {"cbrt", [](double x) { return std::cbrt(x); }}};
      if (auto it = kUnary.find(m); it != kUnary.end()) {
        need(args, 1, name, line);
        return Value::real(it->second(to_real(args[0], line)));
      }
      if (m == "pow") {
        need(args, 2, name, line);
        return Value::real(std::pow(to_real(args[0], line), to_real(args[1], line)));
      }
    }
    if (q == "Integer" || q == "Long") {
      if (m == "parseInt" || m == "parseLong" || m == "valueOf") {
        need(args, 1, name, line);
        if (args[0].tag == Value::Tag::Str) {
          try {
            std::size_t used = 0;
            const long long v = std::stoll(args[0].s, &used);
            if (used != args[0].s.size()) throw std::invalid_argument("trailing");
            return Value::integer(v);
          } catch (const std::exception&) {
            fail("NumberFormatException: \"" + args[0].s + "\"", line);
          }
        }
        return Value::integer(to_int(args[0], line));
      }
      if (m == "toString") {
        need(args, 1, name, line);
        return Value::string(std::to_string(to_int(args[0], line)));
      }
      if (m == "compare") {
        need(args, 2, name, line);
        const auto a = to_int(args[0], line), b = to_int(args[1], line);
        return Value::integer(a < b ? -1 : a > b ? 1 : 0);
      }
      if (m == "max") return num_pair([](auto a, auto b) { return std::max(a, b); }, [](double a, double b) { return std::max(a, b); });
      if (m == "min") return num_pair([](auto a, auto b) { return std::min(a, b); }, [](double a, double b) { return std::min(a, b); });
      if (m == "sum") return num_pair([](auto a, auto b) { return a + b; }, [](double a, double b) { return a + b; });
      if (m == "bitCount") {
        need(args, 1, name, line);
        return Value::integer(__builtin_popcountll(static_cast<unsigned long long>(to_int(args[0], line)) &
                                                  (q == "Integer" ? 0xFFFFFFFFULL : ~0ULL)));
      }
      if (m == "toBinaryString") {
        need(args, 1, name, line);
        std::uint64_t v = static_cast<std::uint64_t>(to_int(args[0], line));
        if (q == "Integer") v &= 0xFFFFFFFFULL;
        std::string out;
        do {
          out.insert(out.begin(), static_cast<char>('0' + (v & 1)));
          v >>= 1;
        } while (v);
        return Value::string(out);
      }
    }
    if (q == "Double") {
      if (m == "parseDouble" || m == "valueOf") {
        need(args, 1, name, line);
        if (args[0].tag == Value::Tag::Str) {
          try {
            return Value::real(std::stod(args[0].s));
          } catch (const std::exception&) {
            fail("NumberFormatException: \"" + args[0].s + "\"", line);
          }
        }
        return Value::real(to_real(args[0], line));
      }
      if (m == "compare") {
        need(args, 2, name, line);
        const double a = to_real(args[0], line), b = to_real(args[1], line);
        return Value::integer(a < b ? -1 : a > b ? 1 : 0);
      }
    }
    if (q == "String") {
      if (m == "valueOf") {
        need(args, 1, name, line);
        if (args[0].tag == Value::Tag::Ref && args[0].ref->kind == ObjKind::Array) {
          std::string out;
          for (const auto& c : args[0].ref->items) out += display(c);
          return Value::string(out);
        }
        return Value::string(display(args[0]));
      }
      if (m == "join") {
        need(args, 2, name, line);
        const Object& o = as_object(args[1], line);
        std::string out;
        for (std::size_t i = 0; i < o.items.size(); ++i) out += (i ? args[0].s : "") + display(o.items[i]);
        return Value::string(out);
      }
    }
    if (q == "Character") {
      need(args, 1, name, line);
      const std::int64_t c = to_int(args[0], line);
      const bool ascii = c >= 0 && c < 128;
      if (m == "isDigit") return Value::boolean(ascii && std::isdigit(static_cast<int>(c)));
      if (m == "isLetter") return Value::boolean(ascii && std::isalpha(static_cast<int>(c)));
      if (m == "isLetterOrDigit") return Value::boolean(ascii && std::isalnum(static_cast<int>(c)));
      if (m == "isUpperCase") return Value::boolean(ascii && std::isupper(static_cast<int>(c)));
      if (m == "isLowerCase") return Value::boolean(ascii && std::islower(static_cast<int>(c)));
      if (m == "isWhitespace") return Value::boolean(ascii && std::isspace(static_cast<int>(c)));
      if (m == "toUpperCase") return Value::character(ascii ? std::toupper(static_cast<int>(c)) : c);
      if (m == "toLowerCase") return Value::character(ascii ? std::tolower(static_cast<int>(c)) : c);
      if (m == "getNumericValue") {
        if (c >= '0' && c <= '9') return Value::integer(c - '0');
        if (ascii && std::isalpha(static_cast<int>(c))) return Value::integer(std::tolower(static_cast<int>(c)) - 'a' + 10);
        return Value::integer(-1);
      }
    }
    if (q == "BigDecimal" && m == "valueOf") {
      need(args, 1, name, line);
      return Value::real(to_real(args[0], line));
    }
    if ((q == "Arrays" && m == "asList") || (q == "List" && m == "of")) return list_of(args);
    if (q == "Arrays") return arrays_call(m, args, line);
    if (q == "Collections") return collections_call(m, args, line);
    fail("unsupported library call " + name, line);
  }

  Value arrays_call(const std::string& m, Args& args, int line) {
    if (args.empty()) fail("Arrays." + m + " needs arguments", line);
    Object& a = as_object(args[0], line);
    ValueLess less;
    if (m == "sort") {
      std::size_t from = 0, to = a.items.size();
      if (args.size() == 3) {
        from = static_cast<std::size_t>(to_int(args[1], line));
        to = static_cast<std::size_t>(to_int(args[2], line));
        if (from > to || to > a.items.size()) fail("sort range out of bounds", line);
      } else if (args.size() != 1) {
        fail("Arrays.sort with a comparator is not supported", line);
      }
      std::stable_sort(a.items.begin() + static_cast<std::ptrdiff_t>(from),
                       a.items.begin() + static_cast<std::ptrdiff_t>(to), less);
      return Value::null();
    }
    if (m == "fill") {
      need(args, 2, "Arrays.fill", line);
      for (auto& x : a.items) x = coerce_element(args[0], args[1], line);
      return Value::null();
    }
    if (m == "toString") return Value::string(display(args[0]));
    if (m == "copyOf" || m == "copyOfRange") {
      std::int64_t from = 0, to = 0;
      if (m == "copyOf") {
        need(args, 2, "Arrays.copyOf", line);
        to = to_int(args[1], line);
      } else {
        need(args, 3, "Arrays.copyOfRange", line);
        from = to_int(args[1], line);
        to = to_int(args[2], line);
      }
      if (from < 0 || from > static_cast<std::int64_t>(a.items.size()) || to < from) fail("copy range out of bounds", line);
      auto o = new_object(ObjKind::Array, a.type_name);
      o->elem_dims = a.elem_dims;
      for (std::int64_t i = from; i < to; ++i) {
        o->items.push_back(i < static_cast<std::int64_t>(a.items.size()) ? a.items[static_cast<std::size_t>(i)]
                                                                        : default_value(a.type_name, a.elem_dims));
      }
      return Value::object(o);
    }
    if (m == "equals") {
      need(args, 2, "Arrays.equals", line);
      const Object& b = as_object(args[1], line);
      if (a.items.size() != b.items.size()) return Value::boolean(false);
      for (std::size_t i = 0; i < a.items.size(); ++i) {
        if (!values_equal(a.items[i], b.items[i])) return Value::boolean(false);
      }
      return Value::boolean(true);
    }
    fail("unsupported library call Arrays." + m, line);
  }

  Value collections_call(const std::string& m, Args& args, int line) {
    if (m == "reverseOrder") return Value::object(new_object(ObjKind::User, "ReverseOrder"));
    if (args.empty()) fail("Collections." + m + " needs arguments", line);
    Object& a = as_object(args[0], line);
    ValueLess less;
    std::vector<Value> items = a.kind == ObjKind::Set ? std::vector<Value>(a.set.begin(), a.set.end()) : a.items;
    if (m == "sort") {
      if (args.size() == 2 && args[1].tag == Value::Tag::Ref && args[1].ref->type_name == "ReverseOrder") {
        std::stable_sort(a.items.begin(), a.items.end(), [&](const Value& x, const Value& y) { return less(y, x); });
      } else if (args.size() == 1) {
        std::stable_sort(a.items.begin(), a.items.end(), less);
      } else {
        fail("Collections.sort with a comparator is not supported", line);
      }
      return Value::null();
    }
    if (m == "reverse") {
      std::reverse(a.items.begin(), a.items.end());
      return Value::null();
    }
    if (m == "swap") {
      need(args, 3, "Collections.swap", line);
      const auto i = to_int(args[1], line), j = to_int(args[2], line);
      const auto n = static_cast<std::int64_t>(a.items.size());
      if (i < 0 || j < 0 || i >= n || j >= n) fail("swap index out of bounds", line);
      std::swap(a.items[static_cast<std::size_t>(i)], a.items[static_cast<std::size_t>(j)]);
      return Value::null();
    }
    if (m == "max" || m == "min") {
      if (items.empty()) fail("NoSuchElementException", line);
      return m == "max" ? *std::max_element(items.begin(), items.end(), less)
                        : *std::min_element(items.begin(), items.end(), less);
    }
    fail("unsupported library call Collections." + m, line);
  }

  Value string_method(const std::string& s, const std::string& m, const Args& args, int line) {
    const auto n = static_cast<std::int64_t>(s.size());
    auto idx = [&](std::size_t k) { return to_int(args.at(k), line); };
    auto as_text = [&](const Value& v) { return v.tag == Value::Tag::Char ? std::string(1, static_cast<char>(v.i)) : display(v); };
    if (m == "length") return Value::integer(n);
    if (m == "charAt") {
      need(args, 1, "charAt", line);
      const auto i = idx(0);
      if (i < 0 || i >= n) fail("string index " + std::to_string(i) + " out of bounds for length " + std::to_string(n), line);
      return Value::character(static_cast<unsigned char>(s[static_cast<std::size_t>(i)]));
    }
    if (m == "substring") {
      const auto b = idx(0);
      const auto e = args.size() > 1 ? idx(1) : n;
      if (b < 0 || e > n || b > e) fail("substring range [" + std::to_string(b) + ", " + std::to_string(e) + ") out of bounds", line);
      return Value::string(s.substr(static_cast<std::size_t>(b), static_cast<std::size_t>(e - b)));
    }
    if (m == "indexOf" || m == "lastIndexOf") {
      const std::string needle = as_text(args.at(0));
      std::size_t pos;
      if (m == "indexOf") {
        const auto from = args.size() > 1 ? static_cast<std::size_t>(std::max<std::int64_t>(0, idx(1))) : 0;
        pos = s.find(needle, from);
      } else {
        pos = s.rfind(needle);
      }
      return Value::integer(pos == std::string::npos ? -1 : static_cast<std::int64_t>(pos));
    }
    if (m == "equals") return Value::boolean(args.at(0).tag == Value::Tag::Str && args[0].s == s);
    if (m == "equalsIgnoreCase") return Value::boolean(args.at(0).tag == Value::Tag::Str && lower(args[0].s) == lower(s));
    if (m == "isEmpty") return Value::boolean(s.empty());
    if (m == "contains") return Value::boolean(s.find(as_text(args.at(0))) != std::string::npos);
    if (m == "startsWith") return Value::boolean(s.rfind(as_text(args.at(0)), 0) == 0);
    if (m == "endsWith") {
      const std::string t = as_text(args.at(0));
      return Value::boolean(s.size() >= t.size() && s.compare(s.size() - t.size(), t.size(), t) == 0);
    }
    if (m == "toUpperCase") return Value::string(upper(s));
    if (m == "toLowerCase") return Value::string(lower(s));
    if (m == "trim") {
      const auto b = s.find_first_not_of(" \t\n\r");
      if (b == std::string::npos) return Value::string("");
      return Value::string(s.substr(b, s.find_last_not_of(" \t\n\r") - b + 1));
    }
    if (m == "compareTo") {
      const std::string& t = args.at(0).s;
      const std::size_t k = std::min(s.size(), t.size());
      for (std::size_t i = 0; i < k; ++i) {
        if (s[i] != t[i]) return Value::integer(static_cast<unsigned char>(s[i]) - static_cast<unsigned char>(t[i]));
      }
      return Value::integer(static_cast<std::int64_t>(s.size()) - static_cast<std::int64_t>(t.size()));
    }
    if (m == "toCharArray") {
      auto o = new_object(ObjKind::Array, "char");
      for (char c : s) o->items.push_back(Value::character(static_cast<unsigned char>(c)));
      return Value::object(o);
    }
    if (m == "split") {
      const std::string sep = as_text(args.at(0));
      auto o = new_object(ObjKind::Array, "String");
      std::vector<std::string> parts;
      if (sep == "\\s+" || sep == " +") {
        std::size_t i = 0;
        while (i < s.size()) {
          const auto b = s.find_first_not_of(" \t\n", i);
          if (b == std::string::npos) break;
          if (b > 0 && parts.empty() && i == 0 && b != 0) parts.emplace_back();
          const auto e = s.find_first_of(" \t\n", b);
          parts.push_back(s.substr(b, e == std::string::npos ? std::string::npos : e - b));
          i = e == std::string::npos ? s.size() : e;
        }
      } else {
        if (sep.empty()) fail("empty split separator", line);
        std::size_t i = 0;
        for (;;) {
          const auto p = s.find(sep, i);
          parts.push_back(s.substr(i, p == std::string::npos ? std::string::npos : p - i));
          if (p == std::string::npos) break;
          i = p + sep.size();
        }
        while (!parts.empty() && parts.back().empty()) parts.pop_back();
      }
      for (auto& p : parts) o->items.push_back(Value::string(p));
      return Value::object(o);
    }
    if (m == "concat") return Value::string(s + args.at(0).s);
    if (m == "repeat") {
      std::string out;
      for (std::int64_t i = 0; i < idx(0); ++i) out += s;
      return Value::string(out);
    }
    if (m == "replace") {
      const std::string from = as_text(args.at(0)), to = as_text(args.at(1));
      if (from.empty()) return Value::string(s);
      std::string out;
      std::size_t i = 0;
      for (;;) {
        const auto p = s.find(from, i);
        out += s.substr(i, p == std::string::npos ? std::string::npos : p - i);
        if (p == std::string::npos) break;
        out += to;
        i = p + from.size();
      }
      return Value::string(out);
    }
    if (m == "toString") return Value::string(s);
    if (m == "hashCode") {
      std::int32_t h = 0;
      for (char c : s) h = static_cast<std::int32_t>(31u * static_cast<std::uint32_t>(h) + static_cast<unsigned char>(c));
      return Value::integer(h);
    }
    fail("unsupported String method " + m, line);
  }

  Value number_method(const Value& v, const std::string& m, const Args& args, int line) {
    if (m == "intValue" || m == "longValue") return Value::integer(v.tag == Value::Tag::Double ? static_cast<std::int64_t>(v.d) : v.i);
    if (m == "doubleValue") return Value::real(v.as_double());
    if (m == "toString") return Value::string(display(v));
    if (m == "equals") return Value::boolean(!args.empty() && values_equal(v, args[0]));
    if (m == "hashCode") return Value::integer(v.tag == Value::Tag::Double ? static_cast<std::int64_t>(v.d) : v.i);
    if (m == "compareTo") {
      need(args, 1, m, line);
      const double a = v.as_double(), b = to_real(args[0], line);
      return Value::integer(a < b ? -1 : a > b ? 1 : 0);
    }
    const double x = v.as_double();
    if (m == "negate") return Value::real(-x);
    if (m == "abs") return Value::real(std::fabs(x));
    if (args.size() >= 1) {
      const double y = to_real(args[0], line);
      if (m == "add") return Value::real(x + y);
      if (m == "subtract") return Value::real(x - y);
      if (m == "multiply") return Value::real(x * y);
      if (m == "divide") {
        if (y == 0) fail("division by zero", line);
        return Value::real(x / y);
      }
      if (m == "max") return Value::real(std::max(x, y));
      if (m == "min") return Value::real(std::min(x, y));
    }
    fail("unsupported numeric method " + m, line);
  }

  Value method_call(const Value& recv, const std::string& m, Args& args, int line) {
    if (recv.tag == Value::Tag::Str) return string_method(recv.s, m, args, line);
    if (recv.is_numeric()) return number_method(recv, m, args, line);
    if (recv.tag == Value::Tag::Bool) {
      if (m == "equals") return Value::boolean(!args.empty() && values_equal(recv, args[0]));
      if (m == "toString") return Value::string(display(recv));
    }
    Object& o = as_object(recv, line);
    if (m == "equals") return Value::boolean(!args.empty() && args[0].tag == Value::Tag::Ref && args[0].ref == recv.ref);
    if (m == "hashCode") return Value::integer(static_cast<std::int64_t>(reinterpret_cast<std::uintptr_t>(recv.ref.get()) & 0x7fffffff));
    if (m == "toString") return Value::string(display(recv));
    switch (o.kind) {
      case ObjKind::Array:
        if (m == "clone") {
          auto c = std::make_shared<Object>(o);
          return Value::object(c);
        }
        break;
      case ObjKind::List:
      case ObjKind::Deque:
      case ObjKind::Stack: return sequence_method(recv, o, m, args, line);
      case ObjKind::PriorityQueue: return pq_method(o, m, args, line);
      case ObjKind::Map: return map_method(o, m, args, line);
      case ObjKind::Set: return set_method(o, m, args, line);
      case ObjKind::StringBuilder: return builder_method(recv, o, m, args, line);
      case ObjKind::Entry:
        if (m == "getKey") return o.items.at(0);
        if (m == "getValue") return o.items.at(1);
        break;
      case ObjKind::User: break;
    }
    fail("unsupported method " + m + " on " + o.type_name, line);
  }

  Value sequence_method(const Value& recv, Object& o, const std::string& m, Args& args, int line) {
    auto& v = o.items;
    const auto n = static_cast<std::int64_t>(v.size());
    const bool stack = o.kind == ObjKind::Stack;
    auto check = [&](std::int64_t i, std::int64_t limit) {
      if (i < 0 || i >= limit) fail("index " + std::to_string(i) + " out of bounds for length " + std::to_string(n), line);
    };
    auto empty_fail = [&]() {
      if (v.empty()) fail(stack ? "EmptyStackException" : "NoSuchElementException", line);
    };
    if (m == "size") return Value::integer(n);
    if (m == "isEmpty" || m == "empty") return Value::boolean(v.empty());
    if (m == "add" || m == "addLast" || m == "offer" || m == "offerLast") {
      if (m == "add" && args.size() == 2) {
        const auto i = to_int(args[0], line);
        check(i, n + 1);
        v.insert(v.begin() + i, args[1]);
        return Value::null();
      }
      need(args, 1, m, line);
      v.push_back(args[0]);
      return Value::boolean(true);
    }
    if (m == "addFirst" || m == "offerFirst") {
      need(args, 1, m, line);
      v.insert(v.begin(), args[0]);
      return Value::boolean(true);
    }
    if (m == "push") {
      need(args, 1, m, line);
      if (stack) v.push_back(args[0]);
      else v.insert(v.begin(), args[0]);
      return args[0];
    }
    if (m == "pop") {
      empty_fail();
      Value out = stack ? v.back() : v.front();
      if (stack) v.pop_back();
      else v.erase(v.begin());
      return out;
    }
    if (m == "peek") {
      if (v.empty()) {
        if (stack) fail("EmptyStackException", line);
        return Value::null();
      }
      return stack ? v.back() : v.front();
    }
    if (m == "poll" || m == "pollFirst") {
      if (v.empty()) return Value::null();
      Value out = v.front();
      v.erase(v.begin());
      return out;
    }
    if (m == "pollLast") {
      if (v.empty()) return Value::null();
      Value out = v.back();
      v.pop_back();
      return out;
    }
    if (m == "peekFirst") return v.empty() ? Value::null() : v.front();
    if (m == "peekLast") return v.empty() ? Value::null() : v.back();
    if (m == "getFirst" || m == "element" || m == "firstElement") {
      empty_fail();
      return v.front();
    }
    if (m == "getLast" || m == "lastElement") {
      empty_fail();
      return v.back();
    }
    if (m == "removeFirst" || (m == "remove" && args.empty())) {
      empty_fail();
      Value out = v.front();
      v.erase(v.begin());
      return out;
    }
    if (m == "removeLast") {
      empty_fail();
      Value out = v.back();
      v.pop_back();
      return out;
    }
    if (m == "get") {
      need(args, 1, m, line);
      const auto i = to_int(args[0], line);
      check(i, n);
      return v[static_cast<std::size_t>(i)];
    }
    if (m == "set") {
      need(args, 2, m, line);
      const auto i = to_int(args[0], line);
      check(i, n);
      Value old = v[static_cast<std::size_t>(i)];
      v[static_cast<std::size_t>(i)] = args[1];
      return old;
    }
    if (m == "remove") {
      need(args, 1, m, line);
      if (args[0].tag == Value::Tag::Int && o.type_name != "ArrayDeque") {
        const auto i = args[0].i;
        check(i, n);
        Value out = v[static_cast<std::size_t>(i)];
        v.erase(v.begin() + i);
        return out;
      }
      auto it = std::find_if(v.begin(), v.end(), [&](const Value& x) { return values_equal(x, args[0]); });
      if (it == v.end()) return Value::boolean(false);
      v.erase(it);
      return Value::boolean(true);
    }
    if (m == "contains") {
      need(args, 1, m, line);
      return Value::boolean(std::any_of(v.begin(), v.end(), [&](const Value& x) { return values_equal(x, args[0]); }));
    }
    if (m == "indexOf" || m == "lastIndexOf") {
      need(args, 1, m, line);
      std::int64_t found = -1;
      for (std::int64_t i = 0; i < n; ++i) {
        if (values_equal(v[static_cast<std::size_t>(i)], args[0])) {
          found = i;
          if (m == "indexOf") break;
        }
      }
      return Value::integer(found);
    }
    if (m == "clear") {
      v.clear();
      return Value::null();
    }
    if (m == "addAll") {
      need(args, 1, m, line);
      const Object& src = as_object(args[0], line);
      if (src.kind == ObjKind::Set) v.insert(v.end(), src.set.begin(), src.set.end());
      else v.insert(v.end(), src.items.begin(), src.items.end());
      return Value::boolean(true);
    }
    if (m == "sort") {
      ValueLess less;
      if (!args.empty() && args[0].tag == Value::Tag::Ref && args[0].ref->type_name == "ReverseOrder") {
        std::stable_sort(v.begin(), v.end(), [&](const Value& x, const Value& y) { return less(y, x); });
      } else if (args.empty() || args[0].is_null()) {
        std::stable_sort(v.begin(), v.end(), less);
      } else {
        fail("sorting with a comparator is not supported", line);
      }
      return Value::null();
    }
    if (m == "subList") {
      need(args, 2, m, line);
      const auto b = to_int(args[0], line), e = to_int(args[1], line);
      if (b < 0 || e > n || b > e) fail("subList range out of bounds", line);
      return list_of(std::vector<Value>(v.begin() + b, v.begin() + e));
    }
    (void)recv;
    fail("unsupported method " + m + " on " + o.type_name, line);
  }

  Value pq_method(Object& o, const std::string& m, Args& args, int line) {
    auto& v = o.items;
    if (m == "size") return Value::integer(static_cast<std::int64_t>(v.size()));
    if (m == "isEmpty") return Value::boolean(v.empty());
    if (m == "add" || m == "offer") {
      need(args, 1, m, line);
      v.push_back(args[0]);
      sort_pq(o);
      return Value::boolean(true);
    }
    if (m == "peek") return v.empty() ? Value::null() : v.front();
    if (m == "poll" || (m == "remove" && args.empty())) {
      if (v.empty()) {
        if (m == "remove") fail("NoSuchElementException", line);
        return Value::null();
      }
      Value out = v.front();
      v.erase(v.begin());
      return out;
    }
    if (m == "remove") {
      auto it = std::find_if(v.begin(), v.end(), [&](const Value& x) { return values_equal(x, args.at(0)); });
      if (it == v.end()) return Value::boolean(false);
      v.erase(it);
      return Value::boolean(true);
    }
    if (m == "contains") {
      return Value::boolean(std::any_of(v.begin(), v.end(), [&](const Value& x) { return values_equal(x, args.at(0)); }));
    }
    if (m == "clear") {
      v.clear();
      return Value::null();
    }
    fail("unsupported method " + m + " on PriorityQueue", line);
  }

  Value map_method(Object& o, const std::string& m, Args& args, int line) {
    auto& mp = o.map;
    auto get = [&](const Value& k) { auto it = mp.find(k); return it == mp.end() ? Value::null() : it->second; };
    if (m == "size") return Value::integer(static_cast<std::int64_t>(mp.size()));
    if (m == "isEmpty") return Value::boolean(mp.empty());
    if (m == "put") {
      need(args, 2, m, line);
      Value old = get(args[0]);
      mp[args[0]] = args[1];
      return old;
    }
    if (m == "putIfAbsent") {
      need(args, 2, m, line);
      Value old = get(args[0]);
      if (old.is_null()) mp[args[0]] = args[1];
      return old;
    }
    if (m == "get") {
      need(args, 1, m, line);
      return get(args[0]);
    }
    if (m == "getOrDefault") {
      need(args, 2, m, line);
      auto it = mp.find(args[0]);
      return it == mp.end() ? args[1] : it->second;
    }
    if (m == "containsKey") return Value::boolean(mp.count(args.at(0)) > 0);
    if (m == "containsValue") {
      return Value::boolean(std::any_of(mp.begin(), mp.end(), [&](const auto& kv) { return values_equal(kv.second, args.at(0)); }));
    }
    if (m == "remove") {
      need(args, 1, m, line);
      Value old = get(args[0]);
      mp.erase(args[0]);
      return old;
    }
    if (m == "clear") {
      mp.clear();
      return Value::null();
    }
    if (m == "keySet") {
      auto s = new_object(ObjKind::Set, "TreeSet");
      for (const auto& kv : mp) s->set.insert(kv.first);
      return Value::object(s);
    }
    if (m == "values") {
      std::vector<Value> vals;
      for (const auto& kv : mp) vals.push_back(kv.second);
      return list_of(std::move(vals));
    }
    if (m == "entrySet") {
      std::vector<Value> entries;
      for (const auto& kv : mp) {
        auto e = new_object(ObjKind::Entry, "Entry");
        e->items = {kv.first, kv.second};
        entries.push_back(Value::object(e));
      }
      return list_of(std::move(entries));
    }
    if (mp.empty() && (m == "firstKey" || m == "lastKey")) fail("NoSuchElementException", line);
    if (m == "firstKey") return mp.begin()->first;
    if (m == "lastKey") return mp.rbegin()->first;
    if (m == "floorKey" || m == "ceilingKey" || m == "higherKey" || m == "lowerKey") {
      std::set<Value, ValueLess> keys;
      for (const auto& kv : mp) keys.insert(kv.first);
      return navigate(keys, m.substr(0, m.size() - 3), args.at(0));
    }
    fail("unsupported method " + m + " on " + o.type_name, line);
  }

  static Value navigate(const std::set<Value, ValueLess>& s, const std::string& how, const Value& key) {
    if (how == "floor") {
      auto it = s.upper_bound(key);
      return it == s.begin() ? Value::null() : *std::prev(it);
    }
    if (how == "lower") {
      auto it = s.lower_bound(key);
      return it == s.begin() ? Value::null() : *std::prev(it);
    }
    if (how == "ceiling") {
      auto it = s.lower_bound(key);
      return it == s.end() ? Value::null() : *it;
    }
    auto it = s.upper_bound(key);
    return it == s.end() ? Value::null() : *it;
  }

  Value set_method(Object& o, const std::string& m, Args& args, int line) {
    auto& s = o.set;
    if (m == "size") return Value::integer(static_cast<std::int64_t>(s.size()));
    if (m == "isEmpty") return Value::boolean(s.empty());
    if (m == "add") return Value::boolean(s.insert(args.at(0)).second);
    if (m == "contains") return Value::boolean(s.count(args.at(0)) > 0);
    if (m == "remove") return Value::boolean(s.erase(args.at(0)) > 0);
    if (m == "clear") {
      s.clear();
      return Value::null();
    }
    if (m == "addAll") {
      const Object& src = as_object(args.at(0), line);
      const std::size_t before = s.size();
      if (src.kind == ObjKind::Set) s.insert(src.set.begin(), src.set.end());
      else s.insert(src.items.begin(), src.items.end());
      return Value::boolean(s.size() != before);
    }
    if (s.empty() && (m == "first" || m == "last")) fail("NoSuchElementException", line);
    if (m == "first") return *s.begin();
    if (m == "last") return *s.rbegin();
    if (m == "floor" || m == "ceiling" || m == "higher" || m == "lower") return navigate(s, m, args.at(0));
    fail("unsupported method " + m + " on " + o.type_name, line);
  }

  Value builder_method(const Value& recv, Object& o, const std::string& m, Args& args, int line) {
    auto& t = o.text;
    const auto n = static_cast<std::int64_t>(t.size());
    auto check = [&](std::int64_t i, std::int64_t limit) {
      if (i < 0 || i >= limit) fail("index " + std::to_string(i) + " out of bounds for length " + std::to_string(n), line);
    };
    if (m == "append") {
      need(args, 1, m, line);
      t += display(args[0]);
      return recv;
    }
    if (m == "length") return Value::integer(n);
    if (m == "charAt") {
      const auto i = to_int(args.at(0), line);
      check(i, n);
      return Value::character(static_cast<unsigned char>(t[static_cast<std::size_t>(i)]));
    }
    if (m == "reverse") {
      std::reverse(t.begin(), t.end());
      return recv;
    }
    if (m == "insert") {
      need(args, 2, m, line);
      const auto i = to_int(args[0], line);
      check(i, n + 1);
      t.insert(static_cast<std::size_t>(i), display(args[1]));
      return recv;
    }
    if (m == "setCharAt") {
      need(args, 2, m, line);
      const auto i = to_int(args[0], line);
      check(i, n);
      t[static_cast<std::size_t>(i)] = static_cast<char>(to_int(args[1], line));
      return Value::null();
    }
    if (m == "deleteCharAt") {
      const auto i = to_int(args.at(0), line);
      check(i, n);
      t.erase(static_cast<std::size_t>(i), 1);
      return recv;
    }
    if (m == "setLength") {
      const auto len = to_int(args.at(0), line);
      if (len < 0) fail("negative length", line);
      t.resize(static_cast<std::size_t>(len), '\0');
      return Value::null();
    }
    fail("unsupported method " + m + " on StringBuilder", line);
  }

  const Ast& ast_;
  ExecuteOptions options_;
  std::vector<std::vector<StmtId>> cd_parents_;
  ExecutionTrace trace_;
  std::deque<Frame> frames_;
  std::deque<StmtCtx> ctxs_;
  std::int64_t steps_ = 0;
};

}  // namespace

ExecutionTrace execute(const Ast& ast, const flow::Pdg& pdg, const ExecuteOptions& options) {
  return Interpreter(ast, pdg, options).run();
}

ExecutionTrace execute(const Ast& ast, const ExecuteOptions& options) {
  const flow::Pdg pdg = flow::build_pdg(ast);
  return execute(ast, pdg, options);
}

std::string trace_to_jsonl(const ExecutionTrace& trace) {
  std::string out;
  for (const auto& e : trace.entries) {
    nlohmann::ordered_json j;
    j["seq"] = e.seq;
    j["line"] = e.line;
    j["stmt"] = e.stmt;
    auto defs = nlohmann::ordered_json::object();
    for (const auto& d : e.defs) defs[d.var] = d.value;
    j["defs"] = defs;
    auto uses = nlohmann::ordered_json::object();
    for (const auto& u : e.uses) uses[u.var] = u.seq;
    j["uses"] = uses;
    j["control_parent"] = e.control_parent < 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(e.control_parent);
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace slicebench::slicing
