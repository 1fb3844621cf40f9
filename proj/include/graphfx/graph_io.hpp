#pragma once

#include <string>
#include <string_view>

#include "graphfx/graph.hpp"

namespace graphfx {

inline constexpr int kGraphSchemaVersion = 1;

// Parses a graph document. Missing params take descriptor defaults and a
// missing gain is 1. Throws ParseError naming the line or offending field.
Graph load_graph(std::string_view json_text);
// Canonical document text (ordered keys, two-space indent, trailing newline).
std::string save_graph(const Graph& g);

Graph load_graph_file(const std::string& path);
void save_graph_file(const Graph& g, const std::string& path);

// Graphviz text; nodes sorted by id, edges in list order.
std::string export_dot(const Graph& g);

}  // namespace graphfx
