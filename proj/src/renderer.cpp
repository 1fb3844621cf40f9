#include "graphfx/renderer.hpp"

#include "render_trace.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_map>

#include "graphfx/dsp/process.hpp"
#include "graphfx/errors.hpp"
#include "graphfx/order.hpp"
#include "graphfx/validate.hpp"

namespace graphfx {

namespace {

std::uint64_t mix_hash(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  return h ^ (h >> 29);
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// An incoming contribution, ordered by what it carries rather than by node
// id so that summation order survives id relabeling.
struct Contribution {
  std::uint64_t key;
  double gain;
  const AudioBuffer* signal;
};

}  // namespace

AudioBuffer render_traced(Graph& graph, const SourceMap& sources, std::size_t length,
                          const NodeHook& hook, RenderTrace* record, const RenderTrace* reuse,
                          const std::set<int>* recompute) {
  require_valid(graph);
  const Adjacency adj(graph);
  const auto order = topological_order(graph);

  // outputs[id][outlet], owned here or borrowed from `reuse`
  std::unordered_map<int, std::vector<AudioBuffer>> owned;
  std::unordered_map<int, const std::vector<AudioBuffer>*> outputs;
  std::unordered_map<int, std::uint64_t> signature;
  std::unordered_map<int, std::size_t> pending;
  for (const auto& n : graph.nodes) pending[n.id] = adj.outgoing(n.id).size();

  AudioBuffer result;
  for (int id : order) {
    Node& node = graph.node(id);
    const auto& spec = node.spec();

    if (reuse && !recompute->count(id) && reuse->outputs.count(id)) {
      outputs[id] = &reuse->outputs.at(id);
      signature[id] = reuse->signature.at(id);
      continue;
    }

    std::vector<std::vector<Contribution>> parts(spec.inlets.size());
    for (std::size_t e : adj.incoming(id)) {
      const Edge& edge = graph.edges[e];
      const auto inlet = *spec.inlet_index(edge.inlet);
      const auto outlet = *graph.node(edge.src).spec().outlet_index(edge.outlet);
      std::uint64_t key = mix_hash(signature.at(edge.src), hash_string(edge.outlet));
      key = mix_hash(key, std::bit_cast<std::uint64_t>(edge.gain));
      parts[inlet].push_back({key, edge.gain, &(*outputs.at(edge.src))[outlet]});
    }

    std::vector<AudioBuffer> sums(spec.inlets.size());
    std::vector<const AudioBuffer*> inlets(spec.inlets.size(), nullptr);
    std::uint64_t sig = mix_hash(0, static_cast<std::uint64_t>(node.type));
    // Energy the node's audio outlets are normalized to: the summed energy
    // of each incoming contribution, so recombined parallel branches keep
    // the total of their parts.
    double reference = 0.0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      auto& list = parts[k];
      if (list.empty()) continue;
      std::sort(list.begin(), list.end(),
                [](const Contribution& a, const Contribution& b) { return a.key < b.key; });
      sums[k] = AudioBuffer(length);
      const bool counts = dsp::is_reference_inlet(spec.inlets[k]);
      for (const auto& c : list) {
        sums[k].add_scaled(*c.signal, c.gain);
        if (counts) reference += c.gain * c.gain * c.signal->energy();
        sig = mix_hash(sig, mix_hash(k, c.key));
      }
      inlets[k] = &sums[k];
    }

    if (Registry::instance().is_source(node.type)) {
      auto it = sources.find(id);
      if (it == sources.end())
        throw Error("no source signal for node " + std::to_string(id) + " (" + spec.name + ")");
      if (it->second.length() != length)
        throw Error("source signal for node " + std::to_string(id) + " has " +
                    std::to_string(it->second.length()) + " samples, expected " +
                    std::to_string(length));
      if (!it->second.is_finite())
        throw NumericError(id, "non-finite source signal at node " + std::to_string(id));
      owned[id].push_back(it->second);
    } else if (Registry::instance().is_sink(node.type)) {
      result = inlets[0] ? std::move(sums[0]) : AudioBuffer(length);
    } else {
      if (hook) hook(node, inlets);
      for (double p : node.params) sig = mix_hash(sig, std::bit_cast<std::uint64_t>(p));
      owned[id] = dsp::run_processor(node.type, node.params, inlets, length, true, id, reference);
    }
    outputs[id] = &owned[id];
    signature[id] = sig;
    if (record) continue;

    for (std::size_t e : adj.incoming(id)) {
      const int src = graph.edges[e].src;
      if (--pending[src] == 0) {
        outputs.erase(src);
        owned.erase(src);
      }
    }
  }
  if (record) {
    record->outputs = std::move(owned);
    record->signature = std::move(signature);
  }
  return result;
}

AudioBuffer render(Graph& graph, const SourceMap& sources, std::size_t length,
                   const NodeHook& hook) {
  return render_traced(graph, sources, length, hook, nullptr, nullptr, nullptr);
}

AudioBuffer render(const RenderRequest& req) {
  Graph g = req.graph;
  return render(g, req.sources, req.length, {});
}

AudioBuffer render_with_default_params(const Graph& graph, const SourceMap& sources,
                                       std::size_t length) {
  Graph g = with_default_params(graph);
  return render(g, sources, length, {});
}

SourceMap bind_sources(const Graph& graph, const std::map<std::string, AudioBuffer>& stems,
                       std::size_t length) {
  SourceMap out;
  for (const auto& n : graph.nodes) {
    if (!Registry::instance().is_source(n.type)) continue;
    auto it = stems.find(n.spec().name);
    if (it == stems.end()) {
      out.emplace(n.id, AudioBuffer(length));
      continue;
    }
    if (it->second.length() != length)
      throw Error("stem '" + n.spec().name + "' has " + std::to_string(it->second.length()) +
                  " samples, expected " + std::to_string(length));
    out.emplace(n.id, it->second);
  }
  return out;
}

}  // namespace graphfx
