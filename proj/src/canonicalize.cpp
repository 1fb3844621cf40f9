#include "graphfx/canonicalize.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "graphfx/validate.hpp"

namespace graphfx {

namespace {

LtiUnit single_unit(const Graph& g, int id) {
  return {id, id, {id}, {g.node(id).type}};
}

// crossover -> (LTI filters in series per branch) -> mix, with no edge
// leaving or entering the block except at the crossover input and the mix
// output.
std::optional<LtiUnit> block_unit(const Graph& g, const Adjacency& adj, int crossover) {
  const Node& c = g.node(crossover);
  if (c.type != id_of(Proc::crossover)) return std::nullopt;
  for (std::size_t e : adj.incoming(crossover))
    if (g.edges[e].inlet != "in") return std::nullopt;

  std::set<int> region = {crossover};
  std::optional<int> exit;
  std::vector<int> stack = {crossover};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    if (adj.outgoing(cur).empty()) return std::nullopt;
    for (std::size_t e : adj.outgoing(cur)) {
      const Edge& edge = g.edges[e];
      const Node& next = g.node(edge.dst);
      if (edge.inlet != "in") return std::nullopt;
      if (next.type == id_of(Proc::mix)) {
        if (exit && *exit != edge.dst) return std::nullopt;
        exit = edge.dst;
        continue;
      }
      if (!is_lti_node(g, adj, edge.dst)) return std::nullopt;
      if (adj.incoming(edge.dst).size() != 1) return std::nullopt;
      if (region.insert(edge.dst).second) stack.push_back(edge.dst);
    }
  }
  if (!exit) return std::nullopt;
  for (std::size_t e : adj.incoming(*exit))
    if (!region.count(g.edges[e].src)) return std::nullopt;
  region.insert(*exit);

  LtiUnit u;
  u.entry = crossover;
  u.exit = *exit;
  u.members.assign(region.begin(), region.end());
  for (int id : u.members) u.types.push_back(g.node(id).type);
  std::sort(u.types.begin(), u.types.end());
  return u;
}

bool key_less(const LtiUnit& a, std::size_t pa, const LtiUnit& b, std::size_t pb) {
  if (a.size() != b.size()) return a.size() < b.size();
  if (a.types != b.types) return a.types < b.types;
  return pa < pb;
}

}  // namespace

bool is_lti_node(const Graph& g, const Adjacency& adj, int id) {
  const Node& n = g.node(id);
  if (!is_lti_filter_type(n.type)) return false;
  for (std::size_t e : adj.incoming(id))
    if (g.edges[e].inlet != "in") return false;
  return true;
}

std::vector<LtiChain> find_lti_chains(const Graph& g, LtiPolicy policy) {
  require_valid(g);
  const Adjacency adj(g);

  std::vector<LtiUnit> units;
  std::set<int> claimed;
  if (policy == LtiPolicy::structural) {
    for (const auto& n : g.nodes) {
      if (auto u = block_unit(g, adj, n.id)) {
        bool overlap = false;
        for (int m : u->members) overlap |= claimed.count(m) != 0;
        if (overlap) continue;
        claimed.insert(u->members.begin(), u->members.end());
        units.push_back(*u);
      }
    }
  }
  for (const auto& n : g.nodes)
    if (!claimed.count(n.id) && is_lti_node(g, adj, n.id)) units.push_back(single_unit(g, n.id));

  std::map<int, std::size_t> by_entry;
  for (std::size_t i = 0; i < units.size(); ++i) by_entry[units[i].entry] = i;

  // successor[i] = j when unit i feeds unit j and nothing else, and unit j
  // hears only unit i.
  std::vector<int> successor(units.size(), -1);
  std::vector<int> predecessor(units.size(), -1);
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& out = adj.outgoing(units[i].exit);
    if (out.size() != 1) continue;
    const Edge& edge = g.edges[out[0]];
    auto it = by_entry.find(edge.dst);
    if (it == by_entry.end() || edge.inlet != "in") continue;
    if (adj.incoming(edge.dst).size() != 1) continue;
    successor[i] = static_cast<int>(it->second);
    predecessor[it->second] = static_cast<int>(i);
  }

  // Heads in order of their entry's position in the node list.
  std::vector<std::size_t> heads;
  for (std::size_t i = 0; i < units.size(); ++i)
    if (predecessor[i] < 0 && successor[i] >= 0) heads.push_back(i);
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) position[g.nodes[i].id] = i;
  std::sort(heads.begin(), heads.end(), [&](std::size_t a, std::size_t b) {
    return position[units[a].entry] < position[units[b].entry];
  });

  std::vector<LtiChain> chains;
  for (std::size_t h : heads) {
    LtiChain chain;
    for (int i = static_cast<int>(h); i >= 0; i = successor[i]) chain.units.push_back(units[i]);
    chains.push_back(std::move(chain));
  }
  return chains;
}

Graph lti_reorder(const Graph& g, LtiPolicy policy) {
  Graph out = g;
  const Adjacency adj(g);
  for (const auto& chain : find_lti_chains(g, policy)) {
    const auto& units = chain.units;
    const std::size_t k = units.size();
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return key_less(units[a], a, units[b], b);
    });
    if (std::is_sorted(order.begin(), order.end())) continue;

    // Collect the edge slots before rewiring so the rewrites do not alias.
    const auto heads_in = adj.incoming(units.front().entry);
    const auto tails_out = adj.outgoing(units.back().exit);
    std::vector<std::size_t> links;
    for (std::size_t i = 0; i + 1 < k; ++i) links.push_back(adj.outgoing(units[i].exit)[0]);

    for (std::size_t e : heads_in) out.edges[e].dst = units[order.front()].entry;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      out.edges[links[i]].src = units[order[i]].exit;
      out.edges[links[i]].dst = units[order[i + 1]].entry;
    }
    for (std::size_t e : tails_out) out.edges[e].src = units[order.back()].exit;
  }
  return out;
}

}  // namespace graphfx
