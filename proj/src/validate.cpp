#include "graphfx/validate.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>

#include "graphfx/errors.hpp"

namespace graphfx {

std::string_view code_name(ViolationCode c) {
  switch (c) {
    case ViolationCode::cyclic: return "cyclic";
    case ViolationCode::disconnected: return "disconnected";
    case ViolationCode::missing_inlet: return "missing_inlet";
    case ViolationCode::bad_endpoint: return "bad_endpoint";
    case ViolationCode::kind_mismatch: return "kind_mismatch";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationCode c) const {
  return std::any_of(violations.begin(), violations.end(),
                     [c](const Violation& v) { return v.code == c; });
}

namespace {

std::string edge_label(const Edge& e) {
  return std::to_string(e.src) + "." + e.outlet + " -> " + std::to_string(e.dst) + "." +
         e.inlet;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ValidationReport validate(const Graph& g) {
  const auto& reg = Registry::instance();
  ValidationReport report;
  auto flag = [&](ViolationCode c, std::string detail) {
    report.violations.push_back({c, std::move(detail)});
  };

  // Known nodes, by id -> position.
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const Node& n = g.nodes[i];
    if (n.type < 0 || n.type >= kNumTypes) {
      flag(ViolationCode::bad_endpoint,
           "node " + std::to_string(n.id) + " has unknown type " + std::to_string(n.type));
      continue;
    }
    if (!pos.emplace(n.id, i).second) {
      flag(ViolationCode::bad_endpoint, "duplicate node id " + std::to_string(n.id));
      continue;
    }
    if (n.params.size() != n.spec().params.size()) {
      flag(ViolationCode::bad_endpoint,
           "node " + std::to_string(n.id) + " has wrong parameter count");
    } else if (std::any_of(n.params.begin(), n.params.end(),
                           [](double v) { return !(v >= 0.0 && v <= 1.0); })) {
      flag(ViolationCode::bad_endpoint,
           "node " + std::to_string(n.id) + " param out of [0,1]");
    }
  }

  // Endpoint and kind checks; only sound edges take part in the graph checks.
  std::vector<const Edge*> sound;
  std::set<std::tuple<int, std::string, int, std::string>> seen;
  for (const Edge& e : g.edges) {
    auto s = pos.find(e.src);
    auto d = pos.find(e.dst);
    if (s == pos.end() || d == pos.end()) {
      flag(ViolationCode::bad_endpoint, "edge " + edge_label(e) + " references unknown node");
      continue;
    }
    const ProcessorSpec& ss = g.nodes[s->second].spec();
    const ProcessorSpec& ds = g.nodes[d->second].spec();
    auto o = ss.outlet_index(e.outlet);
    auto in = ds.inlet_index(e.inlet);
    if (!o || !in) {
      flag(ViolationCode::bad_endpoint, "edge " + edge_label(e) + " names an unknown port");
      continue;
    }
    if (ss.outlets[static_cast<std::size_t>(*o)].kind !=
        ds.inlets[static_cast<std::size_t>(*in)].kind) {
      flag(ViolationCode::kind_mismatch, "edge " + edge_label(e) + " joins audio and control");
      continue;
    }
    if (!seen.emplace(e.src, e.outlet, e.dst, e.inlet).second) {
      flag(ViolationCode::bad_endpoint, "duplicate edge " + edge_label(e));
      continue;
    }
    if (!(e.gain >= 0.0 && e.gain <= kMaxEdgeGain)) {
      flag(ViolationCode::bad_endpoint, "edge " + edge_label(e) + " gain out of [0,2]");
    }
    sound.push_back(&e);
  }

  // Endpoint nodes.
  int sinks = 0;
  int sources = 0;
  std::set<TypeId> source_types;
  const auto allowed = reg.source_types(g.task);
  for (const auto& [id, i] : pos) {
    const TypeId t = g.nodes[i].type;
    if (reg.is_sink(t)) ++sinks;
    if (!reg.is_source(t)) continue;
    ++sources;
    if (std::find(allowed.begin(), allowed.end(), t) == allowed.end()) {
      flag(ViolationCode::bad_endpoint, "source '" + spec_of(t).name + "' not allowed for task " +
                                            std::string(task_name(g.task)));
    } else if (!source_types.insert(t).second) {
      flag(ViolationCode::bad_endpoint, "duplicate source '" + spec_of(t).name + "'");
    }
  }
  if (sinks == 0) flag(ViolationCode::disconnected, "graph has no out node");
  if (sinks > 1) flag(ViolationCode::bad_endpoint, "graph has more than one out node");
  if (sources == 0) flag(ViolationCode::disconnected, "graph has no source node");

  // Required inlets.
  std::set<std::pair<int, std::string>> fed;
  for (const Edge* e : sound) fed.emplace(e->dst, e->inlet);
  for (const auto& [id, i] : pos) {
    for (const auto& inlet : g.nodes[i].spec().inlets) {
      if (!inlet.optional && !fed.count({id, inlet.name})) {
        flag(ViolationCode::missing_inlet, "node " + std::to_string(id) + " (" +
                                               g.nodes[i].spec().name + ") inlet '" +
                                               inlet.name + "' is not connected");
      }
    }
  }

  // Cycles (Kahn) and weak connectivity (union-find) over node positions.
  std::map<int, std::size_t> dense;
  for (const auto& [id, i] : pos) dense.emplace(id, dense.size());
  std::vector<int> indegree(dense.size(), 0);
  std::vector<std::vector<std::size_t>> succ(dense.size());
  DisjointSets sets(dense.size());
  for (const Edge* e : sound) {
    const std::size_t a = dense[e->src];
    const std::size_t b = dense[e->dst];
    succ[a].push_back(b);
    ++indegree[b];
    sets.unite(a, b);
  }
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < indegree.size(); ++i)
    if (indegree[i] == 0) ready.push(i);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t i = ready.front();
    ready.pop();
    ++visited;
    for (std::size_t j : succ[i])
      if (--indegree[j] == 0) ready.push(j);
  }
  if (visited != dense.size()) {
    flag(ViolationCode::cyclic, std::to_string(dense.size() - visited) + " nodes lie on cycles");
  }
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < dense.size(); ++i) roots.insert(sets.find(i));
  if (roots.size() > 1) {
    flag(ViolationCode::disconnected,
         "graph has " + std::to_string(roots.size()) + " weakly connected components");
  }
  return report;
}

void require_valid(const Graph& g) {
  const auto report = validate(g);
  if (!report.valid()) {
    const auto& v = report.violations.front();
    throw InvalidGraphError("invalid graph: " + std::string(code_name(v.code)) + ": " +
                            v.detail);
  }
}

}  // namespace graphfx
