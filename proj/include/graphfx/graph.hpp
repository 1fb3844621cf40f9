#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "graphfx/registry.hpp"

namespace graphfx {

inline constexpr double kMaxEdgeGain = 2.0;

struct Node {
  int id = 0;
  TypeId type = 0;
  // Normalized values in [0, 1], aligned with spec_of(type).params.
  std::vector<double> params;

  const ProcessorSpec& spec() const { return spec_of(type); }
  double param(std::string_view name) const;
  void set_param(std::string_view name, double normalized);
  double physical(std::string_view name) const;

  friend bool operator==(const Node&, const Node&) = default;
};

// Node of `type` with every parameter at its descriptor default.
Node make_node(int id, TypeId type);
Node make_node(int id, Proc type);

struct Edge {
  int src = 0;
  std::string outlet;
  int dst = 0;
  std::string inlet;
  double gain = 1.0;  // linear amplitude in [0, 2]

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Graph {
  Task task = Task::singing;
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  const Node* find(int id) const;
  Node* find(int id);
  const Node& node(int id) const;
  Node& node(int id);
  int next_id() const;

  // Appends a default-parameter node and returns its id.
  int add_node(TypeId type);
  int add_node(Proc type) { return add_node(id_of(type)); }
  void connect(int src, std::string outlet, int dst, std::string inlet,
               double gain = 1.0);

  friend bool operator==(const Graph&, const Graph&) = default;
};

// Edge lists per node, keyed by node id. Edge indices refer to Graph::edges.
class Adjacency {
 public:
  explicit Adjacency(const Graph& g);

  const std::vector<std::size_t>& incoming(int id) const;
  const std::vector<std::size_t>& outgoing(int id) const;
  bool contains(int id) const { return incoming_.count(id) != 0; }

 private:
  std::unordered_map<int, std::vector<std::size_t>> incoming_;
  std::unordered_map<int, std::vector<std::size_t>> outgoing_;
};

// Copy of g with default node params and unit edge gains.
Graph with_default_params(const Graph& g);

// Nodes of a graph grouped into the mixing bus and per-source tracks.
// A node belongs to a track when its main-signal ancestry (following only
// in/mid/side inlets) contains exactly one source; control generators follow
// their consumers. Everything else, including `out`, is the bus.
struct SubgraphPartition {
  std::vector<int> bus;
  // (source type, node ids), ascending source type.
  std::vector<std::pair<TypeId, std::vector<int>>> tracks;
};
SubgraphPartition partition_subgraphs(const Graph& g);

}  // namespace graphfx
