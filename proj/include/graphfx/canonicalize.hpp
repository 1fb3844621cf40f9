#pragma once

#include <vector>

#include "graphfx/graph.hpp"

namespace graphfx {

enum class LtiPolicy {
  // Single LTI filter nodes only. Reordering is output-preserving up to
  // rounding because each node's energy normalization is a scalar.
  exact,
  // Also treats crossover -> LTI filters -> mix blocks as units. Each branch
  // normalizes with its own input-dependent scalar, so swapping such a block
  // with a neighbour changes the output slightly.
  structural,
};

// A swappable unit: one node, or a single-entry/single-exit block.
struct LtiUnit {
  int entry = 0;
  int exit = 0;
  std::vector<int> members;    // ascending id
  std::vector<TypeId> types;   // ascending type id

  std::size_t size() const { return members.size(); }
  friend bool operator==(const LtiUnit&, const LtiUnit&) = default;
};

// Maximal run of two or more units connected in series, upstream first.
struct LtiChain {
  std::vector<LtiUnit> units;
};

// True when the node is an LTI filter type with no connected modulation inlet.
bool is_lti_node(const Graph& g, const Adjacency& adj, int id);

std::vector<LtiChain> find_lti_chains(const Graph& g, LtiPolicy policy = LtiPolicy::exact);

// Sorts every chain's units by (size, sorted type ids, original position)
// and rewires edges in place; nodes, params and edge gains stay put.
Graph lti_reorder(const Graph& g, LtiPolicy policy = LtiPolicy::exact);

}  // namespace graphfx
