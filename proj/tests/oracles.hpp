#pragma once

#include <algorithm>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "slicebench/flow/pdg.hpp"

/// Reference implementations for the flow analyses, built on explicit path
/// search rather than dataflow equations.
namespace testing::oracles {

using slicebench::flow::Cfg;
namespace frontend = slicebench::frontend;

inline bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

inline const std::vector<int>& defs_of(const frontend::Ast& ast, const Cfg& cfg, int node) {
  static const std::vector<int> none;
  const auto s = cfg.stmts[static_cast<std::size_t>(node)];
  return s == frontend::kNone ? none : ast.stmt(s).defs;
}

inline const std::vector<int>& uses_of(const frontend::Ast& ast, const Cfg& cfg, int node) {
  static const std::vector<int> none;
  const auto s = cfg.stmts[static_cast<std::size_t>(node)];
  return s == frontend::kNone ? none : ast.stmt(s).uses;
}

// (def stmt, use stmt, var) triples found by searching for a def-clear path
// over executable edges from every definition.
inline std::set<std::tuple<int, int, int>> brute_force_data_edges(const frontend::Ast& ast, const Cfg& cfg) {
  std::set<std::tuple<int, int, int>> out;
  for (int d = 0; d < cfg.size(); ++d) {
    for (int var : defs_of(ast, cfg, d)) {
      std::vector<char> seen(static_cast<std::size_t>(cfg.size()), 0);
      std::vector<int> stack = cfg.successors(d, true);
      while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        if (seen[static_cast<std::size_t>(x)]) continue;
        seen[static_cast<std::size_t>(x)] = 1;
        if (contains(uses_of(ast, cfg, x), var)) {
          out.emplace(cfg.stmts[static_cast<std::size_t>(d)], cfg.stmts[static_cast<std::size_t>(x)], var);
        }
        if (contains(defs_of(ast, cfg, x), var)) continue;
        for (int y : cfg.successors(x, true)) stack.push_back(y);
      }
    }
  }
  return out;
}

// Visits every path starting at `from` (over all edges) in which no node
// occurs more than twice. `visit` gets the path so far and returns false to
// stop extending it.
inline void for_each_path(const Cfg& cfg, int from, const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> path{from};
  std::vector<int> count(static_cast<std::size_t>(cfg.size()), 0);
  count[static_cast<std::size_t>(from)] = 1;
  std::function<void()> extend = [&] {
    if (!visit(path)) return;
    for (int next : cfg.successors(path.back())) {
      if (count[static_cast<std::size_t>(next)] >= 2) continue;
      ++count[static_cast<std::size_t>(next)];
      path.push_back(next);
      extend();
      path.pop_back();
      --count[static_cast<std::size_t>(next)];
    }
  };
  extend();
}

// node -> set of nodes lying on every enumerated path from node to exit.
inline std::vector<std::set<int>> path_post_dominators(const Cfg& cfg) {
  std::vector<std::set<int>> pdom(static_cast<std::size_t>(cfg.size()));
  for (int n = 0; n < cfg.size(); ++n) {
    bool first = true;
    std::set<int> acc;
    for_each_path(cfg, n, [&](const std::vector<int>& path) {
      if (path.back() != Cfg::kExit) return true;
      std::set<int> on(path.begin(), path.end());
      if (first) {
        acc = on;
        first = false;
      } else {
        std::set<int> both;
        std::set_intersection(acc.begin(), acc.end(), on.begin(), on.end(), std::inserter(both, both.begin()));
        acc = both;
      }
      return false;
    });
    pdom[static_cast<std::size_t>(n)] = acc;
  }
  return pdom;
}

// n is control dependent on p when some path p -> ... -> n has every node
// after p post-dominated by n, and n does not strictly post-dominate p.
inline std::set<std::pair<int, int>> path_control_dependences(const Cfg& cfg, const std::vector<std::set<int>>& pdom) {
  std::set<std::pair<int, int>> out;
  auto pd = [&](int a, int b) { return pdom[static_cast<std::size_t>(b)].count(a) > 0; };
  for (int p = 0; p < cfg.size(); ++p) {
    if (cfg.successors(p).size() < 2) continue;
    for_each_path(cfg, p, [&](const std::vector<int>& path) {
      if (path.size() < 2) return true;
      const int n = path.back();
      bool all = true;
      for (std::size_t j = 1; j < path.size(); ++j) all = all && pd(n, path[j]);
      if (all && !(n != p && pd(n, p))) out.emplace(p, n);
      return path.back() != Cfg::kExit;
    });
  }
  return out;
}

/// Compares PDG data edges with the def-clear path search and, on CFGs of at
/// most `max_nodes` nodes, post-dominators and control dependences with path
/// enumeration. Returns the number of mismatching methods; `small` counts the
/// methods small enough for the second check.
inline int flow_mismatches(const frontend::Ast& ast, const slicebench::flow::Pdg& pdg, int max_nodes, int& small) {
  int bad = 0;
  for (std::size_t m = 0; m < ast.methods.size(); ++m) {
    const auto& flow = pdg.methods[m];
    std::set<std::tuple<int, int, int>> actual;
    for (const auto& e : pdg.edges) {
      if (e.kind == slicebench::flow::DepKind::Data && ast.stmt(e.to).method == static_cast<int>(m)) {
        actual.emplace(e.from, e.to, e.var);
      }
    }
    if (actual != brute_force_data_edges(ast, flow.cfg)) ++bad;
    if (flow.cfg.size() > max_nodes) continue;
    ++small;
    const auto pdom = path_post_dominators(flow.cfg);
    bool same = true;
    for (int n = 0; n < flow.cfg.size(); ++n) {
      const auto& got = flow.pdt.pdom[static_cast<std::size_t>(n)];
      same = same && std::set<int>(got.begin(), got.end()) == pdom[static_cast<std::size_t>(n)];
    }
    same = same && std::set<std::pair<int, int>>(flow.control.begin(), flow.control.end()) ==
                       path_control_dependences(flow.cfg, pdom);
    if (!same) ++bad;
  }
  return bad;
}

}  // namespace testing::oracles
