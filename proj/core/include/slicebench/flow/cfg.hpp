#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "slicebench/frontend/ast.hpp"

namespace slicebench::flow {

using frontend::MethodId;
using frontend::StmtId;
using frontend::SymbolId;
using frontend::kNone;

enum class EdgeLabel { Seq, TrueBranch, FalseBranch, BackEdge, Fallthrough };

const char* to_string(EdgeLabel label);

/// `Fallthrough` edges are the non-executable lexical successors of
/// return/break/continue. They make jumps behave as pseudo-predicates for
/// post-dominance and control dependence; dataflow ignores them.
struct CfgEdge {
  int from = 0;
  int to = 0;
  EdgeLabel label = EdgeLabel::Seq;
  bool back_edge = false;
  bool executable = true;
};

/// Per-method control-flow graph. Node 0 is the entry (the method
/// declaration statement, which defines the parameters); node 1 is the
/// synthetic exit. Every other node is one statement.
struct Cfg {
  MethodId method = kNone;
  std::vector<StmtId> stmts;  // node -> statement; kNone for exit
  std::vector<CfgEdge> edges;
  std::vector<std::vector<int>> out_edges;
  std::vector<std::vector<int>> in_edges;
  std::unordered_map<StmtId, int> node_of_stmt;

  static constexpr int kEntry = 0;
  static constexpr int kExit = 1;

  int size() const { return static_cast<int>(stmts.size()); }
  std::optional<int> node_of(StmtId s) const;
  /// Distinct successors, in edge order.
  std::vector<int> successors(int node, bool executable_only = false) const;
  std::vector<int> predecessors(int node, bool executable_only = false) const;
  /// Node order of a depth-first walk from entry, reversed (over executable edges).
  std::vector<int> reverse_post_order() const;
};

/// Builds the CFG of one method. Throws InternalError on statement kinds that
/// cannot occur inside a method body.
Cfg build_cfg(const frontend::Ast& ast, MethodId method);

}  // namespace slicebench::flow
