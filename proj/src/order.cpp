#include "graphfx/order.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "graphfx/validate.hpp"

namespace graphfx {

std::vector<int> topological_order(const Graph& g) {
  require_valid(g);
  const Adjacency adj(g);
  std::unordered_map<int, int> indegree;
  for (const auto& n : g.nodes) indegree[n.id] = static_cast<int>(adj.incoming(n.id).size());

  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push(id);

  std::vector<int> order;
  order.reserve(g.nodes.size());
  while (!ready.empty()) {
    const int id = ready.top();
    ready.pop();
    order.push_back(id);
    for (std::size_t e : adj.outgoing(id))
      if (--indegree[g.edges[e].dst] == 0) ready.push(g.edges[e].dst);
  }
  return order;
}

namespace {

class BfsEmitter {
 public:
  explicit BfsEmitter(const Graph& g) : g_(g), adj_(g) {}

  // Level-synchronous BFS over reversed edges restricted to `allowed`.
  void run(std::vector<int> seeds, const std::unordered_set<int>& allowed) {
    std::vector<int> frontier;
    for (int id : seeds)
      if (allowed.count(id) && visited_.insert(id).second) frontier.push_back(id);
    sort_frontier(frontier);
    while (!frontier.empty()) {
      order_.insert(order_.end(), frontier.begin(), frontier.end());
      std::vector<int> next;
      for (int id : frontier) {
        for (std::size_t e : adj_.incoming(id)) {
          const int src = g_.edges[e].src;
          if (allowed.count(src) && visited_.insert(src).second) next.push_back(src);
        }
      }
      sort_frontier(next);
      frontier = std::move(next);
    }
  }

  // Emits the rest of `allowed`, re-seeding from nodes adjacent to the
  // already-emitted set (then from the lowest remaining node).
  void complete(const std::unordered_set<int>& allowed) {
    for (;;) {
      std::vector<int> rest;
      for (int id : allowed)
        if (!visited_.count(id)) rest.push_back(id);
      if (rest.empty()) return;
      std::vector<int> seeds;
      for (int id : rest) {
        bool touches = false;
        for (std::size_t e : adj_.incoming(id)) touches |= visited_.count(g_.edges[e].src) > 0;
        for (std::size_t e : adj_.outgoing(id)) touches |= visited_.count(g_.edges[e].dst) > 0;
        if (touches) seeds.push_back(id);
      }
      if (seeds.empty()) seeds.push_back(*std::min_element(rest.begin(), rest.end()));
      run(std::move(seeds), allowed);
    }
  }

  bool visited(int id) const { return visited_.count(id) > 0; }
  const Adjacency& adjacency() const { return adj_; }
  std::vector<int> take() { return std::move(order_); }

 private:
  void sort_frontier(std::vector<int>& ids) const {
    std::sort(ids.begin(), ids.end(), [this](int a, int b) {
      const TypeId ta = g_.node(a).type;
      const TypeId tb = g_.node(b).type;
      return ta != tb ? ta < tb : a < b;
    });
  }

  const Graph& g_;
  Adjacency adj_;
  std::unordered_set<int> visited_;
  std::vector<int> order_;
};

int sink_id(const Graph& g) {
  for (const auto& n : g.nodes)
    if (Registry::instance().is_sink(n.type)) return n.id;
  return g.nodes.front().id;
}

}  // namespace

std::vector<int> bfs_order(const Graph& g) {
  require_valid(g);
  BfsEmitter emitter(g);
  std::unordered_set<int> all;
  for (const auto& n : g.nodes) all.insert(n.id);

  if (g.task == Task::singing) {
    emitter.run({sink_id(g)}, all);
    emitter.complete(all);
    return emitter.take();
  }

  const SubgraphPartition part = partition_subgraphs(g);
  const std::unordered_set<int> bus(part.bus.begin(), part.bus.end());
  emitter.run({sink_id(g)}, bus);
  emitter.complete(bus);

  for (const auto& [type, ids] : part.tracks) {
    const std::unordered_set<int> track(ids.begin(), ids.end());
    // Track exits: members feeding anything already emitted.
    std::vector<int> exits;
    for (int id : ids) {
      for (std::size_t e : emitter.adjacency().outgoing(id)) {
        if (emitter.visited(g.edges[e].dst)) {
          exits.push_back(id);
          break;
        }
      }
    }
    emitter.run(std::move(exits), track);
    emitter.complete(track);
  }
  emitter.complete(all);
  return emitter.take();
}

}  // namespace graphfx
