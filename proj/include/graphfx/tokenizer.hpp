#pragma once

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "graphfx/graph.hpp"

namespace graphfx {

enum class TokenType { start, end, node, edge };

struct Token {
  TokenType type = TokenType::start;
  std::array<int, 2> ids{-1, -1};  // node: {id, -1}; edge: {src, dst}
  int node_type = -1;
  int edge_type = -1;

  static Token start() { return {}; }
  static Token end() { return {TokenType::end}; }
  static Token node(int id, TypeId t) { return {TokenType::node, {id, -1}, t, -1}; }
  static Token edge(int src, int dst, int etype) {
    return {TokenType::edge, {src, dst}, -1, etype};
  }
  friend bool operator==(const Token&, const Token&) = default;
};

struct TokenSequence {
  Task task = Task::singing;
  std::vector<Token> tokens;
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

// Node tokens in bfs_order with ids renumbered by emission; each node is
// followed by its edges to earlier nodes, sorted by (peer id, edge type).
TokenSequence to_tokens(const Graph& g);

enum class Diagnosis { ok, malformed, cyclic, disconnected, missing_inlet, bad_endpoint };
std::string_view diagnosis_name(Diagnosis d);

struct DecodeResult {
  std::optional<Graph> graph;  // set when diagnosis == ok
  Diagnosis diagnosis = Diagnosis::ok;
  std::string detail;
  bool ok() const { return diagnosis == Diagnosis::ok; }
};

// Rebuilds a prototype (default params, unit gains). Never throws.
DecodeResult from_tokens(const TokenSequence& seq);

// JSONL, one token per line; the start token carries the task.
std::string token_to_json(const Token& t, Task task);
void write_tokens(std::ostream& os, const TokenSequence& seq);
// Reads every sequence in the stream. Throws ParseError on bad lines.
std::vector<TokenSequence> read_tokens(std::istream& is);

}  // namespace graphfx
