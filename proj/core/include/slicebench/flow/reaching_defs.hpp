#pragma once

#include <cstdint>
#include <vector>

#include "slicebench/flow/cfg.hpp"

namespace slicebench::flow {

struct DefSite {
  int node = 0;
  SymbolId var = kNone;

  friend bool operator==(const DefSite&, const DefSite&) = default;
  friend auto operator<=>(const DefSite&, const DefSite&) = default;
};

/// IN/OUT sets as sorted indices into `sites`. Parameter definitions are the
/// entry node's own definitions, so OUT(entry) holds exactly those.
struct ReachingDefs {
  std::vector<DefSite> sites;
  std::vector<std::vector<int>> in;
  std::vector<std::vector<int>> out;
  int passes = 0;  // worklist pops until the fixed point
};

enum class WorklistOrder { ReversePostOrder, Shuffled };

/// Forward may-analysis over executable edges with strong kills. The order
/// only affects `passes`, never the result.
ReachingDefs reaching_definitions(const Cfg& cfg, const frontend::Ast& ast,
                                  WorklistOrder order = WorklistOrder::ReversePostOrder,
                                  std::uint64_t shuffle_seed = 0);

}  // namespace slicebench::flow
