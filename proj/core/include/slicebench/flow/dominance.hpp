#pragma once

#include <utility>
#include <vector>

#include "slicebench/flow/cfg.hpp"

namespace slicebench::flow {

/// Post-dominator sets and tree over all CFG edges (fallthrough included).
struct PostDomTree {
  std::vector<std::vector<int>> pdom;  // node -> sorted post-dominators, self included
  std::vector<int> ipdom;              // node -> immediate post-dominator; -1 for exit

  bool post_dominates(int p, int n) const;
};

PostDomTree post_dominators(const Cfg& cfg);

/// (predicate node, dependent node) pairs, sorted. A loop guard depends on itself.
std::vector<std::pair<int, int>> control_dependences(const Cfg& cfg, const PostDomTree& pdt);

}  // namespace slicebench::flow
