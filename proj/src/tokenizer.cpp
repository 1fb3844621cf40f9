#include "graphfx/tokenizer.hpp"

#include <algorithm>
#include <map>
#include <json.hpp>

#include "graphfx/errors.hpp"
#include "graphfx/order.hpp"
#include "graphfx/validate.hpp"

namespace graphfx {

using nlohmann::ordered_json;

TokenSequence to_tokens(const Graph& g) {
  require_valid(g);
  const auto order = bfs_order(g);
  const Adjacency adj(g);
  std::map<int, int> renumber;
  for (std::size_t i = 0; i < order.size(); ++i) renumber[order[i]] = static_cast<int>(i);

  const auto& reg = Registry::instance();
  TokenSequence seq{g.task, {Token::start()}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int id = order[i];
    const int self = static_cast<int>(i);
    seq.tokens.push_back(Token::node(self, g.node(id).type));

    std::vector<std::pair<int, Token>> edges;
    auto consider = [&](std::size_t e) {
      const Edge& edge = g.edges[e];
      const int src = renumber.at(edge.src);
      const int dst = renumber.at(edge.dst);
      const int peer = src == self ? dst : src;
      if (peer >= self) return;
      const int etype = *reg.edge_type_index(edge.outlet, edge.inlet);
      edges.push_back({peer, Token::edge(src, dst, etype)});
    };
    for (std::size_t e : adj.incoming(id)) consider(e);
    for (std::size_t e : adj.outgoing(id)) consider(e);
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second.edge_type < b.second.edge_type;
    });
    for (const auto& [peer, t] : edges) seq.tokens.push_back(t);
  }
  seq.tokens.push_back(Token::end());
  return seq;
}

std::string_view diagnosis_name(Diagnosis d) {
  switch (d) {
    case Diagnosis::ok: return "ok";
    case Diagnosis::malformed: return "malformed";
    case Diagnosis::cyclic: return "cyclic";
    case Diagnosis::disconnected: return "disconnected";
    case Diagnosis::missing_inlet: return "missing_inlet";
    case Diagnosis::bad_endpoint: return "bad_endpoint";
  }
  return "malformed";
}

namespace {

DecodeResult malformed(std::string detail) {
  return {std::nullopt, Diagnosis::malformed, std::move(detail)};
}

}  // namespace

DecodeResult from_tokens(const TokenSequence& seq) {
  const auto& toks = seq.tokens;
  if (toks.size() < 2 || toks.front().type != TokenType::start)
    return malformed("sequence must begin with a start token");
  if (toks.back().type != TokenType::end) return malformed("sequence must end with an end token");

  const auto& reg = Registry::instance();
  Graph g;
  g.task = seq.task;
  int nodes = 0;
  for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
    const Token& t = toks[i];
    const std::string at = " at token " + std::to_string(i);
    switch (t.type) {
      case TokenType::start:
      case TokenType::end:
        return malformed("unexpected start/end token" + at);
      case TokenType::node:
        if (t.ids[0] != nodes) return malformed("node id " + std::to_string(t.ids[0]) +
                                                " out of sequence" + at);
        if (t.node_type < 0 || t.node_type >= kNumTypes)
          return malformed("unknown node type " + std::to_string(t.node_type) + at);
        g.nodes.push_back(make_node(nodes, t.node_type));
        ++nodes;
        break;
      case TokenType::edge: {
        const int src = t.ids[0];
        const int dst = t.ids[1];
        if (src < 0 || dst < 0 || src >= nodes || dst >= nodes)
          return malformed("edge references undeclared node" + at);
        if (src == dst) return {std::nullopt, Diagnosis::cyclic, "self loop" + at};
        if (t.edge_type < 0 || t.edge_type >= static_cast<int>(reg.edge_types().size()))
          return malformed("unknown edge type " + std::to_string(t.edge_type) + at);
        const auto& et = reg.edge_types()[t.edge_type];
        g.edges.push_back({src, et.outlet, dst, et.inlet, 1.0});
        break;
      }
    }
  }
  if (nodes == 0) return malformed("sequence has no nodes");

  const auto report = validate(g);
  if (report.valid()) return {std::move(g), Diagnosis::ok, ""};
  for (auto [code, diag] : {std::pair{ViolationCode::cyclic, Diagnosis::cyclic},
                            std::pair{ViolationCode::disconnected, Diagnosis::disconnected},
                            std::pair{ViolationCode::missing_inlet, Diagnosis::missing_inlet}}) {
    for (const auto& v : report.violations)
      if (v.code == code) return {std::nullopt, diag, v.detail};
  }
  return {std::nullopt, Diagnosis::bad_endpoint, report.violations.front().detail};
}

std::string token_to_json(const Token& t, Task task) {
  ordered_json j;
  switch (t.type) {
    case TokenType::start:
      j["t"] = "S";
      j["task"] = task_name(task);
      break;
    case TokenType::end:
      j["t"] = "E";
      break;
    case TokenType::node:
      j["t"] = "N";
      j["ids"] = {t.ids[0]};
      j["ntype"] = t.node_type;
      break;
    case TokenType::edge:
      j["t"] = "E2";
      j["ids"] = {t.ids[0], t.ids[1]};
      j["etype"] = t.edge_type;
      break;
  }
  return j.dump();
}

void write_tokens(std::ostream& os, const TokenSequence& seq) {
  for (const auto& t : seq.tokens) os << token_to_json(t, seq.task) << '\n';
}

std::vector<TokenSequence> read_tokens(std::istream& is) {
  std::vector<TokenSequence> out;
  std::optional<TokenSequence> cur;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("token line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(e.what());
    }
    if (!j.is_object() || !j.contains("t") || !j["t"].is_string()) fail("missing field 't'");
    const std::string kind = j["t"];
    auto ids = [&](std::size_t n) {
      if (!j.contains("ids") || !j["ids"].is_array() || j["ids"].size() != n)
        fail("field 'ids' must hold " + std::to_string(n) + " integers");
      std::array<int, 2> v{-1, -1};
      for (std::size_t i = 0; i < n; ++i) {
        if (!j["ids"][i].is_number_integer()) fail("field 'ids' must hold integers");
        v[i] = j["ids"][i].get<int>();
      }
      return v;
    };
    auto integer = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_number_integer())
        fail(std::string("missing integer field '") + key + "'");
      return j[key].get<int>();
    };
    if (kind == "S") {
      if (cur) fail("start token inside an open sequence");
      cur.emplace();
      if (j.contains("task")) {
        if (!j["task"].is_string()) fail("field 'task' must be a string");
        auto task = parse_task(j["task"].get<std::string>());
        if (!task) fail("unknown task '" + j["task"].get<std::string>() + "'");
        cur->task = *task;
      }
      cur->tokens.push_back(Token::start());
    } else {
      if (!cur) fail("token outside a sequence");
      if (kind == "E") {
        cur->tokens.push_back(Token::end());
        out.push_back(std::move(*cur));
        cur.reset();
      } else if (kind == "N") {
        cur->tokens.push_back(Token::node(ids(1)[0], integer("ntype")));
      } else if (kind == "E2") {
        const auto v = ids(2);
        cur->tokens.push_back(Token::edge(v[0], v[1], integer("etype")));
      } else {
        fail("unknown token type '" + kind + "'");
      }
    }
  }
  if (cur) {
    ++lineno;
    fail("sequence not terminated by an end token");
  }
  return out;
}

}  // namespace graphfx
