#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>

#include "graphfx/audio_buffer.hpp"
#include "graphfx/graph.hpp"

namespace graphfx {

// Dry signals keyed by source node id.
using SourceMap = std::map<int, AudioBuffer>;

struct RenderRequest {
  Graph graph;
  SourceMap sources;
  std::size_t length = kDefaultSegmentLength;
};

// Called before each processor runs, with its summed inlet signals aligned
// to the spec's inlets (null when unconnected). The hook may change the
// node's params; the render uses the values it leaves behind.
using NodeHook = std::function<void(Node& node, std::span<const AudioBuffer* const> inlets)>;

// Renders the graph and returns the signal at `out`. Throws
// InvalidGraphError, Error for missing/mismatched sources and NumericError
// naming the node that produced a non-finite value.
AudioBuffer render(const RenderRequest& req);
// As render(); the hook sees each processor before it runs and its edits
// are written back to `graph`.
AudioBuffer render(Graph& graph, const SourceMap& sources, std::size_t length,
                   const NodeHook& hook);

// Renders with every param at its default and every edge gain at 1.
AudioBuffer render_with_default_params(const Graph& graph, const SourceMap& sources,
                                       std::size_t length = kDefaultSegmentLength);

// Maps stems keyed by source type name ("in", "kick", ...) onto the graph's
// source node ids. Sources without a stem get silence of `length` samples.
SourceMap bind_sources(const Graph& graph, const std::map<std::string, AudioBuffer>& stems,
                       std::size_t length);

}  // namespace graphfx
