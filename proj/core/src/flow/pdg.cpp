#include "slicebench/flow/pdg.hpp"

#include <algorithm>
#include <sstream>

namespace slicebench::flow {

using frontend::Ast;
using frontend::StmtKind;

const char* to_string(DepKind kind) {
  switch (kind) {
    case DepKind::Data: return "data";
    case DepKind::Control: return "control";
    case DepKind::Call: return "call";
    case DepKind::Param: return "param";
  }
  return "?";
}

std::vector<const PdgEdge*> Pdg::incoming(StmtId s) const {
  std::vector<const PdgEdge*> out;
  for (int e : in_edges.at(static_cast<std::size_t>(s))) out.push_back(&edges[static_cast<std::size_t>(e)]);
  return out;
}

Pdg build_pdg(const Ast& ast) {
  Pdg pdg;
  pdg.is_node.assign(ast.stmts.size(), 0);
  for (std::size_t m = 0; m < ast.methods.size(); ++m) {
    MethodFlow flow;
    flow.cfg = build_cfg(ast, static_cast<MethodId>(m));
    flow.pdt = post_dominators(flow.cfg);
    flow.control = control_dependences(flow.cfg, flow.pdt);
    flow.reaching = reaching_definitions(flow.cfg, ast);
    pdg.methods.push_back(std::move(flow));
  }

  for (const MethodFlow& flow : pdg.methods) {
    const Cfg& cfg = flow.cfg;
    for (int node = 0; node < cfg.size(); ++node) {
      const StmtId s = cfg.stmts[static_cast<std::size_t>(node)];
      if (s == kNone) continue;
      pdg.is_node[static_cast<std::size_t>(s)] = 1;
      const auto& uses = ast.stmt(s).uses;
      for (int site : flow.reaching.in[static_cast<std::size_t>(node)]) {
        const DefSite& d = flow.reaching.sites[static_cast<std::size_t>(site)];
        if (std::binary_search(uses.begin(), uses.end(), d.var)) {
          pdg.edges.push_back({cfg.stmts[static_cast<std::size_t>(d.node)], s, DepKind::Data, d.var});
        }
      }
    }
    for (const auto& [p, n] : flow.control) {
      const StmtId from = cfg.stmts[static_cast<std::size_t>(p)];
      const StmtId to = cfg.stmts[static_cast<std::size_t>(n)];
      if (from == kNone || to == kNone || p == Cfg::kEntry) continue;
      pdg.edges.push_back({from, to, DepKind::Control, kNone});
    }
  }

  // Interprocedural edges.
  for (const auto& stmt : ast.stmts) {
    if (!pdg.is_node[static_cast<std::size_t>(stmt.id)]) continue;
    for (MethodId callee : stmt.callees) {
      const auto& m = ast.method(callee);
      const MethodFlow& flow = pdg.methods[static_cast<std::size_t>(callee)];
      pdg.edges.push_back({stmt.id, m.decl, DepKind::Call, kNone});
      for (SymbolId p : m.params) pdg.edges.push_back({stmt.id, m.decl, DepKind::Param, p});
      for (int node = 0; node < flow.cfg.size(); ++node) {
        const StmtId r = flow.cfg.stmts[static_cast<std::size_t>(node)];
        if (r != kNone && ast.stmt(r).kind == StmtKind::Return && ast.stmt(r).expr) {
          pdg.edges.push_back({r, stmt.id, DepKind::Param, kNone});
        }
      }
      for (int site : flow.reaching.in[Cfg::kExit]) {
        const DefSite& d = flow.reaching.sites[static_cast<std::size_t>(site)];
        if (d.node == Cfg::kEntry) continue;
        const auto& sym = m.symbols[static_cast<std::size_t>(d.var)];
        if (sym.is_param && sym.type.is_mutable_reference()) {
          pdg.edges.push_back({flow.cfg.stmts[static_cast<std::size_t>(d.node)], stmt.id, DepKind::Param, d.var});
        }
      }
    }
  }

  std::sort(pdg.edges.begin(), pdg.edges.end());
  pdg.edges.erase(std::unique(pdg.edges.begin(), pdg.edges.end()), pdg.edges.end());
  pdg.in_edges.assign(ast.stmts.size(), {});
  for (std::size_t e = 0; e < pdg.edges.size(); ++e) {
    pdg.in_edges[static_cast<std::size_t>(pdg.edges[e].to)].push_back(static_cast<int>(e));
  }
  return pdg;
}

std::string pdg_to_dot(const Ast& ast, const Pdg& pdg) {
  std::ostringstream os;
  os << "digraph pdg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (StmtId s : ast.textual_order()) {
    if (!pdg.is_node[static_cast<std::size_t>(s)]) continue;
    const auto& st = ast.stmt(s);
    std::string text(ast.source.line(st.line));
    const auto first = text.find_first_not_of(" \t");
    text = first == std::string::npos ? std::string() : text.substr(first);
    std::string escaped;
    for (char c : text) {
      if (c == '"' || c == '\\') escaped += '\\';
      escaped += c;
    }
    os << "  s" << s << " [label=\"" << st.line << ": " << escaped << "\"];\n";
  }
  for (const PdgEdge& e : pdg.edges) {
    os << "  s" << e.from << " -> s" << e.to << " [label=\"" << to_string(e.kind);
    if (e.var != kNone && (e.kind == DepKind::Data || e.kind == DepKind::Param)) {
      const MethodId owner = e.kind == DepKind::Data ? ast.stmt(e.to).method : ast.stmt(e.from).method;
      const MethodId param_owner = ast.stmt(e.to).kind == StmtKind::MethodDecl ? ast.stmt(e.to).method : owner;
      os << " " << ast.symbol(e.kind == DepKind::Param ? param_owner : owner, e.var).name;
    }
    os << "\"";
    if (e.kind == DepKind::Control) os << ", style=dashed";
    if (e.kind == DepKind::Call || e.kind == DepKind::Param) os << ", style=dotted";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace slicebench::flow
