#pragma once

#include <string>
#include <vector>

#include "slicebench/flow/cfg.hpp"
#include "slicebench/flow/dominance.hpp"
#include "slicebench/flow/reaching_defs.hpp"

namespace slicebench::flow {

enum class DepKind { Data, Control, Call, Param };

const char* to_string(DepKind kind);

/// `to` depends on `from`.
///   Data     a definition of `var` at `from` reaches a use at `to`
///   Control  `to` is control-dependent on predicate `from`
///   Call     call site `from` invokes the method whose entry is `to`
///   Param    parameter-in: call site -> callee entry (`var` = callee parameter);
///            parameter-out: callee return, or a callee definition of a
///            reference parameter that reaches exit -> call site
struct PdgEdge {
  StmtId from = kNone;
  StmtId to = kNone;
  DepKind kind = DepKind::Data;
  SymbolId var = kNone;

  friend bool operator==(const PdgEdge&, const PdgEdge&) = default;
  friend auto operator<=>(const PdgEdge&, const PdgEdge&) = default;
};

struct MethodFlow {
  Cfg cfg;
  PostDomTree pdt;
  std::vector<std::pair<int, int>> control;  // CFG node pairs
  ReachingDefs reaching;
};

struct Pdg {
  std::vector<PdgEdge> edges;                // sorted, unique
  std::vector<std::vector<int>> in_edges;    // statement id -> edge indices
  std::vector<char> is_node;                 // statement id -> participates
  std::vector<MethodFlow> methods;           // indexed by MethodId

  std::vector<const PdgEdge*> incoming(StmtId s) const;
};

Pdg build_pdg(const frontend::Ast& ast);

/// Graphviz rendering keyed by statement line, for debugging.
std::string pdg_to_dot(const frontend::Ast& ast, const Pdg& pdg);

}  // namespace slicebench::flow
