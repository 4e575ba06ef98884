#include "slicebench/flow/reaching_defs.hpp"

#include <algorithm>
#include <boost/dynamic_bitset.hpp>
#include <deque>
#include <random>

namespace slicebench::flow {

ReachingDefs reaching_definitions(const Cfg& cfg, const frontend::Ast& ast, WorklistOrder order,
                                  std::uint64_t shuffle_seed) {
  using Bits = boost::dynamic_bitset<>;
  const auto n = static_cast<std::size_t>(cfg.size());

  ReachingDefs rd;
  std::vector<std::vector<int>> sites_of_node(n);
  for (std::size_t node = 0; node < n; ++node) {
    const StmtId s = cfg.stmts[node];
    if (s == kNone) continue;
    for (SymbolId v : ast.stmt(s).defs) {
      sites_of_node[node].push_back(static_cast<int>(rd.sites.size()));
      rd.sites.push_back(DefSite{static_cast<int>(node), v});
    }
  }
  const std::size_t m = rd.sites.size();

  std::vector<Bits> gen(n, Bits(m)), kill(n, Bits(m));
  for (std::size_t node = 0; node < n; ++node) {
    for (int site : sites_of_node[node]) {
      gen[node].set(static_cast<std::size_t>(site));
      for (std::size_t other = 0; other < m; ++other) {
        if (rd.sites[other].var == rd.sites[static_cast<std::size_t>(site)].var &&
            other != static_cast<std::size_t>(site)) {
          kill[node].set(other);
        }
      }
    }
  }

  std::vector<int> visit = cfg.reverse_post_order();
  for (int i = 0; i < cfg.size(); ++i) {
    if (std::find(visit.begin(), visit.end(), i) == visit.end()) visit.push_back(i);
  }
  if (order == WorklistOrder::Shuffled) {
    std::mt19937_64 rng(shuffle_seed);
    std::shuffle(visit.begin(), visit.end(), rng);
  }

  std::vector<Bits> in(n, Bits(m)), out(n, Bits(m));
  std::deque<int> work(visit.begin(), visit.end());
  std::vector<char> queued(n, 1);
  while (!work.empty()) {
    const int node = work.front();
    work.pop_front();
    queued[static_cast<std::size_t>(node)] = 0;
    ++rd.passes;
    const auto u = static_cast<std::size_t>(node);
    Bits next_in(m);
    for (int p : cfg.predecessors(node, true)) next_in |= out[static_cast<std::size_t>(p)];
    Bits next_out = gen[u] | (next_in - kill[u]);
    in[u] = std::move(next_in);
    if (next_out != out[u]) {
      out[u] = std::move(next_out);
      for (int s : cfg.successors(node, true)) {
        if (!queued[static_cast<std::size_t>(s)]) {
          queued[static_cast<std::size_t>(s)] = 1;
          work.push_back(s);
        }
      }
    }
  }

  auto to_list = [](const Bits& b) {
    std::vector<int> v;
    for (auto i = b.find_first(); i != Bits::npos; i = b.find_next(i)) v.push_back(static_cast<int>(i));
    return v;
  };
  rd.in.reserve(n);
  rd.out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rd.in.push_back(to_list(in[i]));
    rd.out.push_back(to_list(out[i]));
  }
  return rd;
}

}  // namespace slicebench::flow
