#pragma once

#include <vector>

#include "graphfx/graph.hpp"

namespace graphfx {

// Kahn order; ready nodes are taken in ascending id. Rejects invalid graphs.
std::vector<int> topological_order(const Graph& g);

// Decoding order: breadth-first over reversed edges from `out`. Frontiers
// are sorted by (type_id, id). For drum graphs the mixing bus is emitted in
// full before the track subgraphs, which follow in ascending source type.
// Nodes that do not reach `out` are appended by undirected adjacency.
std::vector<int> bfs_order(const Graph& g);

}  // namespace graphfx
