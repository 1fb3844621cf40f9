#include <catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "graphfx/errors.hpp"
#include "graphfx/graph_io.hpp"
#include "graphfx/order.hpp"
#include "graphfx/rng.hpp"
#include "graphfx/synthgen.hpp"
#include "graphfx/validate.hpp"
#include "oracles.hpp"

using namespace graphfx;

namespace {

std::string classify(const ValidationReport& r) {
  if (r.valid()) return "valid";
  if (r.has(ViolationCode::cyclic)) return "cyclic";
  if (r.has(ViolationCode::disconnected)) return "disconnected";
  if (r.has(ViolationCode::missing_inlet)) return "missing_inlet";
  return "other";
}

Graph fixture(const std::string& name) { return load_graph_file(oracle::fixture_path(name)); }

std::vector<int> ids_of(const Graph& g, const std::vector<int>& order, Proc p) {
  std::vector<int> out;
  for (int id : order)
    if (g.node(id).type == id_of(p)) out.push_back(id);
  return out;
}

}  // namespace

TEST_CASE("validation fixtures match their hand labels") {
  std::ifstream in(oracle::fixture_path("validation/labels.json"));
  const auto labels = nlohmann::json::parse(in);
  REQUIRE(labels.size() == 30);
  for (const auto& [file, label] : labels.items()) {
    INFO(file);
    CHECK(classify(validate(fixture("validation/" + file))) == label.get<std::string>());
  }
}

TEST_CASE("paper-named violations") {
  CHECK(validate(fixture("fig1.json")).valid());

  Graph two_cycle;
  const int in = two_cycle.add_node(Proc::in);
  const int a = two_cycle.add_node(Proc::mix);
  const int b = two_cycle.add_node(Proc::mix);
  const int out = two_cycle.add_node(Proc::out);
  two_cycle.connect(in, "out", a, "in");
  two_cycle.connect(a, "out", b, "in");
  two_cycle.connect(b, "out", a, "in");
  two_cycle.connect(b, "out", out, "in");
  CHECK(validate(two_cycle).has(ViolationCode::cyclic));

  Graph comp;
  const int s = comp.add_node(Proc::in);
  const int c = comp.add_node(Proc::compressor);
  const int o = comp.add_node(Proc::out);
  comp.connect(s, "out", c, "sidechain");
  comp.connect(c, "out", o, "in");
  const auto r = validate(comp);
  CHECK(r.has(ViolationCode::missing_inlet));
  CHECK_FALSE(r.has(ViolationCode::cyclic));
  CHECK_THROWS_AS(require_valid(comp), InvalidGraphError);
}

TEST_CASE("endpoint and kind errors") {
  Graph g;
  const int in = g.add_node(Proc::in);
  const int lfo = g.add_node(Proc::lfo);
  const int bell = g.add_node(Proc::bell);
  const int out = g.add_node(Proc::out);
  g.connect(in, "out", bell, "in");
  g.connect(lfo, "lfo", bell, "in");  // control into an audio inlet
  g.connect(bell, "out", out, "in");
  CHECK(validate(g).has(ViolationCode::kind_mismatch));

  Graph h;
  const int i2 = h.add_node(Proc::in);
  const int o2 = h.add_node(Proc::out);
  h.connect(i2, "wet", o2, "in");
  CHECK(validate(h).has(ViolationCode::bad_endpoint));

  Graph two_outs;
  const int i3 = two_outs.add_node(Proc::in);
  two_outs.connect(i3, "out", two_outs.add_node(Proc::out), "in");
  two_outs.connect(i3, "out", two_outs.add_node(Proc::out), "in");
  CHECK_FALSE(validate(two_outs).valid());

  Graph dup;
  const int i4 = dup.add_node(Proc::in);
  const int o4 = dup.add_node(Proc::out);
  dup.connect(i4, "out", o4, "in");
  dup.connect(i4, "out", o4, "in");
  CHECK_FALSE(validate(dup).valid());
}

TEST_CASE("removing any required-inlet edge invalidates a generated graph") {
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    GenConfig cfg;
    cfg.task = i % 2 ? Task::drum : Task::singing;
    const Graph g = sample_prototype(cfg, rng);
    REQUIRE(validate(g).valid());
    // Required inlets fed by exactly one edge
    std::map<std::pair<int, std::string>, int> feeds;
    for (const auto& e : g.edges) ++feeds[{e.dst, e.inlet}];
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      const Edge& e = g.edges[k];
      const auto& spec = g.node(e.dst).spec();
      const auto idx = spec.inlet_index(e.inlet);
      if (spec.inlets[static_cast<std::size_t>(*idx)].optional || feeds[{e.dst, e.inlet}] != 1) continue;
      Graph cut = g;
      cut.edges.erase(cut.edges.begin() + static_cast<std::ptrdiff_t>(k));
      CHECK_FALSE(validate(cut).valid());
    }
  }
}

TEST_CASE("topological order") {
  Graph io;
  const int a = io.add_node(Proc::in);
  const int b = io.add_node(Proc::out);
  io.connect(a, "out", b, "in");
  CHECK(topological_order(io) == std::vector<int>{a, b});

  const Graph fig1 = fixture("fig1.json");
  CHECK(topological_order(fig1) == std::vector<int>{0, 1, 2, 3, 4, 5});

  // Diamond with ids b < c: ties go to the lower id.
  Graph d;
  const int s = d.add_node(Proc::in);
  const int lo = d.add_node(Proc::bell);
  const int hi = d.add_node(Proc::lowpass);
  const int m = d.add_node(Proc::mix);
  const int o = d.add_node(Proc::out);
  d.connect(s, "out", hi, "in");
  d.connect(s, "out", lo, "in");
  d.connect(lo, "out", m, "in");
  d.connect(hi, "out", m, "in");
  d.connect(m, "out", o, "in");
  CHECK(topological_order(d) == std::vector<int>{s, lo, hi, m, o});

  CHECK_THROWS_AS(topological_order(fixture("validation/c01_two_cycle.json")), InvalidGraphError);
}

TEST_CASE("topological order respects every edge of generated graphs") {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    GenConfig cfg;
    cfg.task = i % 2 ? Task::drum : Task::singing;
    const Graph g = sample_prototype(cfg, rng);
    const auto order = topological_order(g);
    REQUIRE(order.size() == g.nodes.size());
    std::map<int, std::size_t> pos;
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
    REQUIRE(pos.size() == g.nodes.size());
    for (const auto& e : g.edges) CHECK(pos.at(e.src) < pos.at(e.dst));
  }
}

TEST_CASE("bfs order") {
  Graph io;
  const int a = io.add_node(Proc::in);
  const int b = io.add_node(Proc::out);
  io.connect(a, "out", b, "in");
  CHECK(bfs_order(io) == std::vector<int>{b, a});

  const Graph fig1 = fixture("fig1.json");
  std::vector<std::string> names;
  for (int id : bfs_order(fig1)) names.push_back(fig1.node(id).spec().name);
  CHECK(names == std::vector<std::string>{"out", "mix", "distortion", "distortion", "crossover", "in"});
}

TEST_CASE("drum bfs emits the mixing bus before any track") {
  const Graph g = fixture("drum_bus.json");
  const auto order = bfs_order(g);
  const auto part = partition_subgraphs(g);
  const std::set<int> bus(part.bus.begin(), part.bus.end());
  REQUIRE(part.tracks.size() == 4);
  // bus: mix, lowshelf, lfo, compressor, out
  CHECK(bus.size() == 5);
  std::size_t first_track = order.size();
  std::size_t last_bus = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (bus.count(order[k])) last_bus = k;
    else first_track = std::min(first_track, k);
  }
  CHECK(last_bus < first_track);
  // Tracks follow in ascending source type: kick, snare, hat, ride.
  const auto sources = ids_of(g, order, Proc::kick);
  REQUIRE(sources.size() == 1);
  std::vector<TypeId> track_order;
  for (int id : order)
    if (!bus.count(id))
      for (const auto& [src, members] : part.tracks)
        if (std::count(members.begin(), members.end(), id) &&
            (track_order.empty() || track_order.back() != src))
          track_order.push_back(src);
  CHECK(track_order == std::vector<TypeId>{id_of(Proc::kick), id_of(Proc::snare),
                                           id_of(Proc::hat), id_of(Proc::ride)});
}

TEST_CASE("bfs order is a deterministic permutation") {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    GenConfig cfg;
    cfg.task = i % 2 ? Task::drum : Task::singing;
    const Graph g = sample_prototype(cfg, rng);
    const auto order = bfs_order(g);
    std::set<int> ids(order.begin(), order.end());
    CHECK(ids.size() == g.nodes.size());
    CHECK(order.size() == g.nodes.size());
    CHECK(bfs_order(g) == order);
    CHECK(g.node(order.front()).type == id_of(Proc::out));
  }
}
