#include "slicebench/flow/dominance.hpp"

#include <algorithm>
#include <boost/dynamic_bitset.hpp>

namespace slicebench::flow {

bool PostDomTree::post_dominates(int p, int n) const {
  const auto& set = pdom[static_cast<std::size_t>(n)];
  return std::binary_search(set.begin(), set.end(), p);
}

PostDomTree post_dominators(const Cfg& cfg) {
  const auto n = static_cast<std::size_t>(cfg.size());
  using Bits = boost::dynamic_bitset<>;
  std::vector<Bits> sets(n, Bits(n).set());
  sets[Cfg::kExit] = Bits(n);
  sets[Cfg::kExit].set(Cfg::kExit);

  // Reverse post-order of the reverse graph is a good visiting order, but any
  // order reaches the same greatest fixed point.
  const auto rpo = cfg.reverse_post_order();
  std::vector<int> order(rpo.rbegin(), rpo.rend());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(order.begin(), order.end(), static_cast<int>(i)) == order.end()) order.push_back(static_cast<int>(i));
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int node : order) {
      if (node == Cfg::kExit) continue;
      Bits next(n);
      bool first = true;
      for (int s : cfg.successors(node)) {
        if (first) {
          next = sets[static_cast<std::size_t>(s)];
          first = false;
        } else {
          next &= sets[static_cast<std::size_t>(s)];
        }
      }
      next.set(static_cast<std::size_t>(node));
      if (next != sets[static_cast<std::size_t>(node)]) {
        sets[static_cast<std::size_t>(node)] = std::move(next);
        changed = true;
      }
    }
  }

  PostDomTree out;
  out.pdom.resize(n);
  out.ipdom.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto b = sets[i].find_first(); b != Bits::npos; b = sets[i].find_next(b)) {
      out.pdom[i].push_back(static_cast<int>(b));
    }
  }
  // The immediate post-dominator is the strict post-dominator with the
  // largest post-dominator set of its own (it sits lowest in the chain).
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (int p : out.pdom[i]) {
      if (static_cast<std::size_t>(p) == i) continue;
      const std::size_t size = out.pdom[static_cast<std::size_t>(p)].size();
      if (size > best) {
        best = size;
        out.ipdom[i] = p;
      }
    }
  }
  return out;
}

std::vector<std::pair<int, int>> control_dependences(const Cfg& cfg, const PostDomTree& pdt) {
  std::vector<std::pair<int, int>> out;
  for (const CfgEdge& e : cfg.edges) {
    if (pdt.post_dominates(e.to, e.from) && e.to != e.from) continue;
    const int stop = pdt.ipdom[static_cast<std::size_t>(e.from)];
    for (int n = e.to; n != stop && n != -1; n = pdt.ipdom[static_cast<std::size_t>(n)]) {
      out.emplace_back(e.from, n);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace slicebench::flow
