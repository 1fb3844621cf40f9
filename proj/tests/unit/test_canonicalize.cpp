#include <catch_amalgamated.hpp>

#include <algorithm>

#include "graphfx/canonicalize.hpp"
#include "graphfx/errors.hpp"
#include "graphfx/graph_io.hpp"
#include "graphfx/metrics.hpp"
#include "graphfx/renderer.hpp"
#include "graphfx/stems.hpp"
#include "graphfx/tokenizer.hpp"
#include "graphfx/validate.hpp"
#include "oracles.hpp"

using namespace graphfx;

namespace {

// in -> types... -> tail -> out, ids in list order.
Graph serial(const std::vector<Proc>& types, Proc tail = Proc::distortion) {
  Graph g;
  int prev = g.add_node(Proc::in);
  for (Proc p : types) {
    const int id = g.add_node(p);
    g.connect(prev, "out", id, "in");
    prev = id;
  }
  const int t = g.add_node(tail);
  g.connect(prev, "out", t, "in");
  g.connect(t, "out", g.add_node(Proc::out), "in");
  return g;
}

// Types met walking from `in` along "out" edges until a non-filter.
std::vector<TypeId> walk_types(const Graph& g) {
  const Adjacency adj(g);
  std::vector<TypeId> seen;
  int cur = 0;
  for (;;) {
    const auto& out = adj.outgoing(cur);
    if (out.size() != 1) break;
    cur = g.edges[out[0]].dst;
    if (!is_lti_filter_type(g.node(cur).type)) break;
    seen.push_back(g.node(cur).type);
  }
  return seen;
}

}  // namespace

TEST_CASE("a bell -> lowshelf run forms one chain") {
  const Graph g = serial({Proc::bell, Proc::lowshelf});
  const auto chains = find_lti_chains(g);
  REQUIRE(chains.size() == 1);
  REQUIRE(chains[0].units.size() == 2);
  CHECK(chains[0].units[0].types == std::vector<TypeId>{id_of(Proc::bell)});
  CHECK(chains[0].units[1].types == std::vector<TypeId>{id_of(Proc::lowshelf)});
}

TEST_CASE("a lone nonlinear node has no chains") {
  CHECK(find_lti_chains(serial({})).empty());
  // one filter is not a chain either
  CHECK(find_lti_chains(serial({Proc::bell})).empty());
  CHECK(lti_reorder(serial({Proc::bell})) == serial({Proc::bell}));
}

TEST_CASE("units are sorted by type id") {
  const Graph g = lti_reorder(serial({Proc::highshelf, Proc::lowpass}));
  CHECK(walk_types(g) == std::vector<TypeId>{id_of(Proc::lowpass), id_of(Proc::highshelf)});
  // Nodes and params stay put; only edges move.
  CHECK(g.nodes == serial({Proc::highshelf, Proc::lowpass}).nodes);
}

TEST_CASE("a modulated filter breaks a chain") {
  // in -> highshelf -> lowshelf(lfo on frequency) -> bell -> lowpass -> distortion -> out
  Graph g = serial({Proc::highshelf, Proc::lowshelf, Proc::bell, Proc::lowpass});
  const int lfo = g.add_node(Proc::lfo);
  g.connect(lfo, "lfo", 2, "frequency");
  REQUIRE(validate(g).valid());
  const Adjacency adj(g);
  CHECK_FALSE(is_lti_node(g, adj, 2));
  CHECK(is_lti_node(g, adj, 1));

  const auto chains = find_lti_chains(g);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].units[0].entry == 3);
  CHECK(chains[0].units[1].entry == 4);

  const Graph h = lti_reorder(g);
  CHECK(walk_types(h) == std::vector<TypeId>{id_of(Proc::highshelf), id_of(Proc::lowshelf),
                                             id_of(Proc::lowpass), id_of(Proc::bell)});
}

TEST_CASE("non-LTI processors are never chain members") {
  for (Proc p : {Proc::phaser, Proc::compressor, Proc::chorus, Proc::bitcrush, Proc::mono_reverb}) {
    INFO(spec_of(id_of(p)).name);
    CHECK_FALSE(is_lti_filter_type(id_of(p)));
  }
}

TEST_CASE("structural policy moves a crossover block after single filters") {
  const Graph g = load_graph_file(oracle::fixture_path("lti_block.json"));
  // Exact policy: highshelf and bell are each alone between the block and
  // the distortion.
  CHECK(find_lti_chains(g, LtiPolicy::exact).empty());

  const auto chains = find_lti_chains(g, LtiPolicy::structural);
  REQUIRE(chains.size() == 1);
  const auto& u = chains[0].units;
  REQUIRE(u.size() == 3);
  CHECK(u[0].size() == 1);
  CHECK(u[1].size() == 4);
  CHECK(u[1].entry == 2);
  CHECK(u[1].exit == 5);
  CHECK(u[2].size() == 1);

  const Graph h = lti_reorder(g, LtiPolicy::structural);
  REQUIRE(validate(h).valid());
  // in -> highshelf -> bell -> crossover block -> distortion
  const Adjacency adj(h);
  auto next = [&](int id) { return h.edges[adj.outgoing(id)[0]].dst; };
  CHECK(next(0) == 1);
  CHECK(next(1) == 6);
  CHECK(next(6) == 2);
  CHECK(next(5) == 7);
  CHECK(lti_reorder(h, LtiPolicy::structural) == h);
}

TEST_CASE("reordering is idempotent and keeps graphs valid") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Graph g = oracle::random_lti_graph(rng);
    REQUIRE(validate(g).valid());
    for (LtiPolicy policy : {LtiPolicy::exact, LtiPolicy::structural}) {
      const Graph h = lti_reorder(g, policy);
      REQUIRE(validate(h).valid());
      CHECK(lti_reorder(h, policy) == h);
      CHECK(h.nodes == g.nodes);
      CHECK(h.edges.size() == g.edges.size());
    }
  }
}

TEST_CASE("exact reordering preserves the rendered output") {
  constexpr std::size_t kLen = 16384;
  Rng rng(12);
  int moved = 0;
  for (int i = 0; i < 40; ++i) {
    const Graph g = oracle::random_lti_graph(rng);
    const Graph h = lti_reorder(g);
    if (!(h == g)) ++moved;
    const auto stems = make_stems(Task::singing, 50 + static_cast<std::uint64_t>(i), kLen);
    const AudioBuffer a = render(RenderRequest{g, bind_sources(g, stems, kLen), kLen});
    const AudioBuffer b = render(RenderRequest{h, bind_sources(h, stems, kLen), kLen});
    CHECK(mss(a, b) < 1e-6);
  }
  // the generator rarely emits already-sorted chains
  CHECK(moved > 20);
}

TEST_CASE("every ordering of a chain has the same canonical form") {
  std::vector<Proc> types = {Proc::bell, Proc::lowpass, Proc::highshelf, Proc::bandpass};
  std::sort(types.begin(), types.end());
  const Graph first = lti_reorder(serial(types));
  const TokenSequence first_tokens = to_tokens(first);
  std::vector<TypeId> sorted_ids;
  for (Proc p : types) sorted_ids.push_back(id_of(p));
  std::sort(sorted_ids.begin(), sorted_ids.end());
  CHECK(walk_types(first) == sorted_ids);

  int count = 0;
  do {
    const Graph h = lti_reorder(serial(types));
    CHECK(oracle::isomorphic(h, first));
    CHECK(to_tokens(h) == first_tokens);
    ++count;
  } while (std::next_permutation(types.begin(), types.end()));
  CHECK(count == 24);
}

TEST_CASE("canonical form is invariant to relabelling") {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Graph g = oracle::random_lti_graph(rng);
    std::vector<int> perm(static_cast<std::size_t>(g.next_id()));
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = static_cast<int>(k);
    for (std::size_t k = perm.size(); k > 1; --k)
      std::swap(perm[k - 1], perm[static_cast<std::size_t>(rng.integer(0, static_cast<int>(k) - 1))]);
    const Graph h = oracle::relabel(g, perm, rng);
    CHECK(oracle::isomorphic(lti_reorder(g), lti_reorder(h)));
  }
}

TEST_CASE("canonicalization rejects invalid graphs") {
  const Graph bad = load_graph_file(oracle::fixture_path("validation/c01_two_cycle.json"));
  CHECK_THROWS_AS(lti_reorder(bad), InvalidGraphError);
  CHECK_THROWS_AS(find_lti_chains(bad), InvalidGraphError);
}
