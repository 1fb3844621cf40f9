#include "graphfx/graph.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graphfx/errors.hpp"

namespace graphfx {

namespace {

int require_param(const Node& n, std::string_view name) {
  auto idx = n.spec().param_index(name);
  if (!idx) {
    throw Error("type '" + n.spec().name + "' has no param '" + std::string(name) + "'");
  }
  return *idx;
}

const std::vector<std::size_t> kNoEdges;

}  // namespace

double Node::param(std::string_view name) const {
  return params[static_cast<std::size_t>(require_param(*this, name))];
}

void Node::set_param(std::string_view name, double normalized) {
  if (!(normalized >= 0.0 && normalized <= 1.0)) throw Error("param out of [0,1]");
  params[static_cast<std::size_t>(require_param(*this, name))] = normalized;
}

double Node::physical(std::string_view name) const {
  const int i = require_param(*this, name);
  return spec().params[static_cast<std::size_t>(i)].to_physical(
      params[static_cast<std::size_t>(i)]);
}

Node make_node(int id, TypeId type) {
  Node n{id, type, {}};
  for (const auto& d : spec_of(type).params) n.params.push_back(d.default_normalized());
  return n;
}

Node make_node(int id, Proc type) { return make_node(id, id_of(type)); }

const Node* Graph::find(int id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

Node* Graph::find(int id) {
  for (auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const Node& Graph::node(int id) const {
  const Node* n = find(id);
  if (!n) throw Error("no node with id " + std::to_string(id));
  return *n;
}

Node& Graph::node(int id) {
  Node* n = find(id);
  if (!n) throw Error("no node with id " + std::to_string(id));
  return *n;
}

int Graph::next_id() const {
  int next = 0;
  for (const auto& n : nodes) next = std::max(next, n.id + 1);
  return next;
}

int Graph::add_node(TypeId type) {
  const int id = next_id();
  nodes.push_back(make_node(id, type));
  return id;
}

void Graph::connect(int src, std::string outlet, int dst, std::string inlet,
                    double gain) {
  edges.push_back({src, std::move(outlet), dst, std::move(inlet), gain});
}

Adjacency::Adjacency(const Graph& g) {
  for (const auto& n : g.nodes) {
    incoming_[n.id];
    outgoing_[n.id];
  }
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    if (auto it = outgoing_.find(edge.src); it != outgoing_.end()) it->second.push_back(e);
    if (auto it = incoming_.find(edge.dst); it != incoming_.end()) it->second.push_back(e);
  }
}

const std::vector<std::size_t>& Adjacency::incoming(int id) const {
  auto it = incoming_.find(id);
  return it == incoming_.end() ? kNoEdges : it->second;
}

const std::vector<std::size_t>& Adjacency::outgoing(int id) const {
  auto it = outgoing_.find(id);
  return it == outgoing_.end() ? kNoEdges : it->second;
}

Graph with_default_params(const Graph& g) {
  Graph out = g;
  for (auto& n : out.nodes) n = make_node(n.id, n.type);
  for (auto& e : out.edges) e.gain = 1.0;
  return out;
}

SubgraphPartition partition_subgraphs(const Graph& g) {
  const auto& reg = Registry::instance();
  const Adjacency adj(g);

  auto is_main_inlet = [](const std::string& inlet) {
    return inlet == "in" || inlet == "mid" || inlet == "side";
  };

  // Main-signal source ancestry, memoized. Cycles are cut by the `visiting` set.
  std::map<int, std::set<TypeId>> ancestry;
  std::set<int> visiting;
  auto sources_of = [&](auto&& self, int id) -> const std::set<TypeId>& {
    if (auto it = ancestry.find(id); it != ancestry.end()) return it->second;
    std::set<TypeId> acc;
    const Node* n = g.find(id);
    if (n && reg.is_source(n->type)) acc.insert(n->type);
    if (n && visiting.insert(id).second) {
      for (std::size_t e : adj.incoming(id)) {
        const Edge& edge = g.edges[e];
        if (!is_main_inlet(edge.inlet) || !g.find(edge.src)) continue;
        const auto& up = self(self, edge.src);
        acc.insert(up.begin(), up.end());
      }
      visiting.erase(id);
    }
    return ancestry[id] = std::move(acc);
  };

  std::map<int, std::optional<TypeId>> track_of;  // nullopt = bus
  std::vector<int> undecided;
  for (const auto& n : g.nodes) {
    const auto& anc = sources_of(sources_of, n.id);
    if (reg.is_sink(n.type) || anc.size() > 1) {
      track_of[n.id] = std::nullopt;
    } else if (anc.size() == 1) {
      track_of[n.id] = *anc.begin();
    } else {
      undecided.push_back(n.id);
    }
  }
  // Nodes without main-signal ancestry (LFOs) join their consumers' group
  // when all consumers agree; resolved iteratively for chained generators.
  bool progress = true;
  while (!undecided.empty() && progress) {
    progress = false;
    std::vector<int> still;
    for (int id : undecided) {
      std::set<std::optional<TypeId>> groups;
      bool pending = false;
      for (std::size_t e : adj.outgoing(id)) {
        auto it = track_of.find(g.edges[e].dst);
        if (it == track_of.end()) {
          pending = true;
        } else {
          groups.insert(it->second);
        }
      }
      if (pending) {
        still.push_back(id);
        continue;
      }
      track_of[id] = groups.size() == 1 ? *groups.begin() : std::nullopt;
      progress = true;
    }
    undecided = std::move(still);
  }
  for (int id : undecided) track_of[id] = std::nullopt;

  SubgraphPartition part;
  std::map<TypeId, std::vector<int>> tracks;
  for (const auto& n : g.nodes) {
    const auto& t = track_of[n.id];
    if (t) {
      tracks[*t].push_back(n.id);
    } else {
      part.bus.push_back(n.id);
    }
  }
  std::sort(part.bus.begin(), part.bus.end());
  for (auto& [type, ids] : tracks) {
    std::sort(ids.begin(), ids.end());
    part.tracks.emplace_back(type, std::move(ids));
  }
  return part;
}

}  // namespace graphfx
