#pragma once

#include <cstdint>
#include <set>
#include <unordered_map>
#include <vector>

#include "graphfx/renderer.hpp"

namespace graphfx {

// Every node's outlet signals and summation signature from one render.
struct RenderTrace {
  std::unordered_map<int, std::vector<AudioBuffer>> outputs;
  std::unordered_map<int, std::uint64_t> signature;
};

// render() with two extras. `record` keeps every node's outputs. With
// `reuse`, nodes outside `recompute` take their outputs from that trace
// instead of running; the caller guarantees their inputs are unchanged.
AudioBuffer render_traced(Graph& graph, const SourceMap& sources, std::size_t length,
                          const NodeHook& hook, RenderTrace* record, const RenderTrace* reuse,
                          const std::set<int>* recompute);

}  // namespace graphfx
