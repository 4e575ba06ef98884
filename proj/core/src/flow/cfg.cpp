#include "slicebench/flow/cfg.hpp"

#include <algorithm>
#include <functional>

#include "slicebench/error.hpp"

namespace slicebench::flow {

using frontend::Ast;
using frontend::LoopForm;
using frontend::Stmt;
using frontend::StmtKind;

const char* to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::Seq: return "seq";
    case EdgeLabel::TrueBranch: return "true-branch";
    case EdgeLabel::FalseBranch: return "false-branch";
    case EdgeLabel::BackEdge: return "back-edge";
    case EdgeLabel::Fallthrough: return "fallthrough";
  }
  return "?";
}

std::optional<int> Cfg::node_of(StmtId s) const {
  if (auto it = node_of_stmt.find(s); it != node_of_stmt.end()) return it->second;
  return std::nullopt;
}

std::vector<int> Cfg::successors(int node, bool executable_only) const {
  std::vector<int> out;
  for (int e : out_edges[static_cast<std::size_t>(node)]) {
    const CfgEdge& edge = edges[static_cast<std::size_t>(e)];
    if (executable_only && !edge.executable) continue;
    if (std::find(out.begin(), out.end(), edge.to) == out.end()) out.push_back(edge.to);
  }
  return out;
}

std::vector<int> Cfg::predecessors(int node, bool executable_only) const {
  std::vector<int> out;
  for (int e : in_edges[static_cast<std::size_t>(node)]) {
    const CfgEdge& edge = edges[static_cast<std::size_t>(e)];
    if (executable_only && !edge.executable) continue;
    if (std::find(out.begin(), out.end(), edge.from) == out.end()) out.push_back(edge.from);
  }
  return out;
}

std::vector<int> Cfg::reverse_post_order() const {
  std::vector<int> order;
  std::vector<char> seen(stmts.size(), 0);
  // Iterative DFS so deep straight-line methods cannot exhaust the stack.
  std::vector<std::pair<int, std::size_t>> stack{{kEntry, 0}};
  seen[kEntry] = 1;
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto succ = successors(node, true);
    if (next < succ.size()) {
      const int s = succ[next++];
      if (!seen[static_cast<std::size_t>(s)]) {
        seen[static_cast<std::size_t>(s)] = 1;
        stack.emplace_back(s, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

namespace {

class CfgBuilder {
 public:
  CfgBuilder(const Ast& ast, MethodId method) : ast_(ast) {
    cfg_.method = method;
    const auto& m = ast.method(method);
    add_node(m.decl);
    cfg_.stmts.push_back(kNone);
    cfg_.out_edges.emplace_back();
    cfg_.in_edges.emplace_back();
  }

  Cfg run() {
    const auto& m = ast_.method(cfg_.method);
    const int first = build(m.body, Cfg::kExit);
    add_edge(Cfg::kEntry, first, EdgeLabel::Seq);
    mark_back_edges();
    return std::move(cfg_);
  }

 private:
  int add_node(StmtId s) {
    const int n = cfg_.size();
    cfg_.stmts.push_back(s);
    cfg_.out_edges.emplace_back();
    cfg_.in_edges.emplace_back();
    cfg_.node_of_stmt[s] = n;
    return n;
  }

  void add_edge(int from, int to, EdgeLabel label, bool executable = true) {
    const int e = static_cast<int>(cfg_.edges.size());
    cfg_.edges.push_back(CfgEdge{from, to, label, false, executable});
    cfg_.out_edges[static_cast<std::size_t>(from)].push_back(e);
    cfg_.in_edges[static_cast<std::size_t>(to)].push_back(e);
  }

  int build_seq(const std::vector<StmtId>& list, int next) {
    for (auto it = list.rbegin(); it != list.rend(); ++it) next = build(*it, next);
    return next;
  }

  void jump(int node, int target, int next) {
    add_edge(node, target, EdgeLabel::Seq);
    if (target != next) add_edge(node, next, EdgeLabel::Fallthrough, false);
  }

  int build(StmtId id, int next) {
    if (id == kNone) return next;
    const Stmt& s = ast_.stmt(id);
    switch (s.kind) {
      case StmtKind::Block:
        return build_seq(s.body, next);
      case StmtKind::Decl:
      case StmtKind::Assign:
      case StmtKind::Call: {
        const int n = add_node(id);
        add_edge(n, next, EdgeLabel::Seq);
        return n;
      }
      case StmtKind::Return: {
        const int n = add_node(id);
        jump(n, Cfg::kExit, next);
        return n;
      }
      case StmtKind::Break:
      case StmtKind::Continue: {
        if (loops_.empty()) throw InternalError("jump outside a loop at line " + std::to_string(s.line));
        const int n = add_node(id);
        const auto& [brk, cont] = loops_.back();
        jump(n, s.kind == StmtKind::Break ? brk : cont, next);
        return n;
      }
      case StmtKind::If: {
        const int n = add_node(id);
        const int t = build(s.then_branch, next);
        const int f = build(s.else_branch, next);
        add_edge(n, t, EdgeLabel::TrueBranch);
        add_edge(n, f, EdgeLabel::FalseBranch);
        return n;
      }
      case StmtKind::Loop:
        return build_loop(s, next);
      default:
        throw InternalError(std::string("unexpected ") + frontend::to_string(s.kind) +
                            " statement inside a method body at line " + std::to_string(s.line));
    }
  }

  int build_loop(const Stmt& s, int next) {
    const int guard = add_node(s.id);
    if (s.loop_form == LoopForm::DoWhile) {
      loops_.emplace_back(next, guard);
      const int body = build(s.loop_body, guard);
      loops_.pop_back();
      add_edge(guard, body, EdgeLabel::TrueBranch);
      add_edge(guard, next, EdgeLabel::FalseBranch);
      return body;
    }
    const int update = build_seq(s.for_update, guard);
    loops_.emplace_back(next, update);
    const int body = build(s.loop_body, update);
    loops_.pop_back();
    add_edge(guard, body, EdgeLabel::TrueBranch);
    add_edge(guard, next, EdgeLabel::FalseBranch);
    return build_seq(s.for_init, guard);
  }

  void mark_back_edges() {
    // An edge is a back edge when it targets a node on the current DFS stack.
    std::vector<char> state(cfg_.stmts.size(), 0);  // 0 new, 1 on stack, 2 done
    std::function<void(int)> dfs = [&](int n) {
      state[static_cast<std::size_t>(n)] = 1;
      for (int e : cfg_.out_edges[static_cast<std::size_t>(n)]) {
        CfgEdge& edge = cfg_.edges[static_cast<std::size_t>(e)];
        const auto to = static_cast<std::size_t>(edge.to);
        if (state[to] == 1) {
          edge.back_edge = true;
          if (edge.label == EdgeLabel::Seq) edge.label = EdgeLabel::BackEdge;
        } else if (state[to] == 0) {
          dfs(edge.to);
        }
      }
      state[static_cast<std::size_t>(n)] = 2;
    };
    dfs(Cfg::kEntry);
  }

  const Ast& ast_;
  Cfg cfg_;
  std::vector<std::pair<int, int>> loops_;  // (break target, continue target)
};

}  // namespace

Cfg build_cfg(const Ast& ast, MethodId method) { return CfgBuilder(ast, method).run(); }

}  // namespace slicebench::flow
