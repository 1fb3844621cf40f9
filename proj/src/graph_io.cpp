#include "graphfx/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graphfx/errors.hpp"

namespace graphfx {

using json = nlohmann::ordered_json;

namespace {

std::string line_context(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(end), '\n');
  return "line " + std::to_string(line);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParseError(where + ": unknown field '" + key + "'");
    }
  }
}

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + ": missing field '" + key + "'");
  return *it;
}

int int_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected integer");
  return v.get<int>();
}

std::string string_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_string()) throw ParseError(where + "." + key + ": expected string");
  return v.get<std::string>();
}

}  // namespace

Graph load_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("parse error at " + line_context(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("document: expected object");
  reject_unknown(doc, {"v", "task", "nodes", "edges"}, "document");

  if (auto it = doc.find("v"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<int>() != kGraphSchemaVersion) {
      throw ParseError("document.v: unsupported schema version");
    }
  }
  Graph g;
  const auto task = parse_task(string_field(doc, "task", "document"));
  if (!task) throw ParseError("document.task: expected 'singing' or 'drum'");
  g.task = *task;

  const json& nodes = field(doc, "nodes", "document");
  if (!nodes.is_array()) throw ParseError("document.nodes: expected array");
  std::set<int> ids;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const json& jn = nodes[i];
    if (!jn.is_object()) throw ParseError(where + ": expected object");
    reject_unknown(jn, {"id", "type", "params"}, where);
    const int id = int_field(jn, "id", where);
    if (id < 0) throw ParseError(where + ".id: must be non-negative");
    if (!ids.insert(id).second) throw ParseError(where + ".id: duplicate id " + std::to_string(id));
    const std::string type_name = string_field(jn, "type", where);
    const auto type = Registry::instance().find(type_name);
    if (!type) throw ParseError(where + ".type: unknown processor '" + type_name + "'");
    Node node = make_node(id, *type);
    if (auto p = jn.find("params"); p != jn.end()) {
      if (!p->is_object()) throw ParseError(where + ".params: expected object");
      for (const auto& [name, value] : p->items()) {
        const auto idx = node.spec().param_index(name);
        if (!idx) throw ParseError(where + ".params." + name + ": unknown param");
        if (!value.is_number()) throw ParseError(where + ".params." + name + ": expected number");
        const double v = value.get<double>();
        if (!(v >= 0.0 && v <= 1.0)) {
          throw ParseError(where + ".params." + name + ": param out of [0,1]");
        }
        node.params[static_cast<std::size_t>(*idx)] = v;
      }
    }
    g.nodes.push_back(std::move(node));
  }

  const json& edges = field(doc, "edges", "document");
  if (!edges.is_array()) throw ParseError("document.edges: expected array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& je = edges[i];
    if (!je.is_object()) throw ParseError(where + ": expected object");
    reject_unknown(je, {"src", "outlet", "dst", "inlet", "gain"}, where);
    Edge e;
    e.src = int_field(je, "src", where);
    e.outlet = string_field(je, "outlet", where);
    e.dst = int_field(je, "dst", where);
    e.inlet = string_field(je, "inlet", where);
    if (!ids.count(e.src)) throw ParseError(where + ".src: unknown node id");
    if (!ids.count(e.dst)) throw ParseError(where + ".dst: unknown node id");
    if (auto gain = je.find("gain"); gain != je.end()) {
      if (!gain->is_number()) throw ParseError(where + ".gain: expected number");
      e.gain = gain->get<double>();
      if (!(e.gain >= 0.0 && e.gain <= kMaxEdgeGain)) {
        throw ParseError(where + ".gain: out of [0,2]");
      }
    }
    g.edges.push_back(std::move(e));
  }
  return g;
}

std::string save_graph(const Graph& g) {
  json doc;
  doc["v"] = kGraphSchemaVersion;
  doc["task"] = std::string(task_name(g.task));
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["type"] = n.spec().name;
    json params = json::object();
    const auto& descs = n.spec().params;
    for (std::size_t i = 0; i < descs.size() && i < n.params.size(); ++i) {
      params[descs[i].name] = n.params[i];
    }
    jn["params"] = std::move(params);
    nodes.push_back(std::move(jn));
  }
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back(json{{"src", e.src}, {"outlet", e.outlet}, {"dst", e.dst},
                         {"inlet", e.inlet}, {"gain", e.gain}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

Graph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_graph(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void save_graph_file(const Graph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << save_graph(g);
  if (!out) throw Error("write failed for " + path);
}

std::string export_dot(const Graph& g) {
  std::vector<const Node*> sorted;
  for (const auto& n : g.nodes) sorted.push_back(&n);
  std::sort(sorted.begin(), sorted.end(),
            [](const Node* a, const Node* b) { return a->id < b->id; });

  std::ostringstream os;
  os << "digraph G {\n  rankdir=LR;\n";
  for (const Node* n : sorted) {
    const bool known = n->type >= 0 && n->type < kNumTypes;
    os << "  n" << n->id << " [label=\"" << (known ? n->spec().name : "?") << "\"];\n";
  }
  for (const auto& e : g.edges) {
    os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << e.outlet << "→"
       << e.inlet << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace graphfx
