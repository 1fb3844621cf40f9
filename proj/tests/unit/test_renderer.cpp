#include <catch_amalgamated.hpp>

#include <numeric>

#include "graphfx/dsp/process.hpp"
#include "graphfx/errors.hpp"
#include "graphfx/graph_io.hpp"
#include "graphfx/metrics.hpp"
#include "graphfx/order.hpp"
#include "graphfx/renderer.hpp"
#include "graphfx/stems.hpp"
#include "graphfx/synthgen.hpp"
#include "oracles.hpp"

using namespace graphfx;
using Catch::Approx;

namespace {

constexpr std::size_t kLen = 16384;

Graph fixture(const std::string& name) { return load_graph_file(oracle::fixture_path(name)); }

Graph randomized(const Graph& proto, Rng& rng) {
  Graph g = proto;
  for (auto& n : g.nodes)
    for (double& p : n.params) p = rng.uniform();
  for (auto& e : g.edges) e.gain = rng.uniform(0.25, 1.0);
  return g;
}

}  // namespace

TEST_CASE("in to out returns the dry source") {
  Graph g;
  const int in = g.add_node(Proc::in);
  const int out = g.add_node(Proc::out);
  g.connect(in, "out", out, "in");
  Rng rng(1);
  const AudioBuffer x = oracle::white_noise(rng, kLen);
  CHECK(render(RenderRequest{g, {{in, x}}, kLen}) == x);
}

TEST_CASE("edge gains apply once") {
  Graph g;
  const int in = g.add_node(Proc::in);
  const int out = g.add_node(Proc::out);
  g.connect(in, "out", out, "in", 0.3);
  Rng rng(2);
  const AudioBuffer x = oracle::white_noise(rng, kLen);
  AudioBuffer want(kLen);
  want.add_scaled(x, 0.3);
  CHECK(render(RenderRequest{g, {{in, x}}, kLen}) == want);
}

TEST_CASE("inlet signals are summed with their gains") {
  // in -0.5-> mix and in -> imager(unit width) -0.5-> mix: the mix hears x.
  Graph g;
  const int in = g.add_node(Proc::in);
  const int im = g.add_node(Proc::imager);
  const int mix = g.add_node(Proc::mix);
  const int out = g.add_node(Proc::out);
  g.connect(in, "out", mix, "in", 0.5);
  g.connect(in, "out", im, "in");
  g.connect(im, "out", mix, "in", 0.5);
  g.connect(mix, "out", out, "in");
  Rng rng(3);
  const AudioBuffer x = oracle::white_noise(rng, kLen);
  AudioBuffer heard;
  const AudioBuffer y = render(g, {{in, x}}, kLen, [&](Node& n, std::span<const AudioBuffer* const> inlets) {
    if (n.id == mix) heard = *inlets[0];
  });
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < kLen; ++i) REQUIRE(heard.at(c, i) == Approx(x.at(c, i)).margin(1e-12));
  // The output carries the summed energy of the two contributions, 0.25 + 0.25.
  CHECK(y.energy() == Approx(0.5 * x.energy()).epsilon(1e-9));
  for (std::size_t i = 0; i < kLen; i += 31) CHECK(y.at(0, i) == Approx(x.at(0, i) * std::sqrt(0.5)).margin(1e-12));
}

TEST_CASE("Fig. 1 multiband distortion keeps the input energy") {
  const Graph g = fixture("fig1.json");
  const auto stems = make_stems(Task::singing, 4, kLen);
  const AudioBuffer y = render(RenderRequest{g, bind_sources(g, stems, kLen), kLen});
  CHECK(y.energy() == Approx(stems.at("in").energy()).epsilon(1e-4));

  // Default params differ from the fixture's, and so does the render.
  const AudioBuffer d = render_with_default_params(g, bind_sources(g, stems, kLen), kLen);
  CHECK(mss(y, d) > 0.0);
  CHECK(render_with_default_params(g, bind_sources(g, stems, kLen), kLen) == d);
}

TEST_CASE("rendering is repeatable and invariant to id relabelling") {
  Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    GenConfig cfg;
    cfg.task = i % 2 ? Task::drum : Task::singing;
    cfg.length = kLen;
    const Graph g = randomized(sample_prototype(cfg, rng), rng);
    const auto stems = make_stems(cfg.task, 100 + static_cast<std::uint64_t>(i), kLen, false);
    const AudioBuffer y = render(RenderRequest{g, bind_sources(g, stems, kLen), kLen});
    CHECK(render(RenderRequest{g, bind_sources(g, stems, kLen), kLen}) == y);

    std::vector<int> perm(static_cast<std::size_t>(g.next_id()));
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = perm.size(); k > 1; --k)
      std::swap(perm[k - 1], perm[static_cast<std::size_t>(rng.integer(0, static_cast<int>(k) - 1))]);
    const Graph h = oracle::relabel(g, perm, rng);
    CHECK(render(RenderRequest{h, bind_sources(h, stems, kLen), kLen}) == y);
  }
}

TEST_CASE("an unconnected optional inlet equals an all-zero control") {
  Rng rng(5);
  const AudioBuffer x = oracle::white_noise(rng, 4096);
  const AudioBuffer zero(4096);
  for (const auto& spec : Registry::instance().specs()) {
    for (const auto& inlet : spec.inlets) {
      if (!inlet.optional || inlet.kind != PortKind::control) continue;
      INFO(spec.name << "." << inlet.name);
      dsp::PortSignals base;
      for (const auto& other : spec.inlets)
        if (!other.optional) base[other.name] = x;
      dsp::PortSignals with_zero = base;
      with_zero[inlet.name] = zero;
      dsp::ProcessorState a, b;
      CHECK(dsp::process(spec.type_id, {}, base, a) == dsp::process(spec.type_id, {}, with_zero, b));
    }
  }
}

TEST_CASE("render errors") {
  const Graph g = fixture("fig1.json");
  const auto stems = make_stems(Task::singing, 1, kLen);

  SECTION("invalid graph") {
    const Graph bad = fixture("validation/c02_three_cycle.json");
    CHECK_THROWS_AS(render(RenderRequest{bad, {{0, stems.at("in")}}, kLen}), InvalidGraphError);
  }
  SECTION("missing source") { CHECK_THROWS_AS(render(RenderRequest{g, {}, kLen}), Error); }
  SECTION("length mismatch") {
    CHECK_THROWS_AS(render(RenderRequest{g, {{0, AudioBuffer(100)}}, kLen}), Error);
  }
  SECTION("a non-finite source names its node") {
    AudioBuffer x = stems.at("in");
    x.at(1, 77) = std::numeric_limits<double>::infinity();
    try {
      render(RenderRequest{g, {{0, x}}, kLen});
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(e.node_id() == 0);  // the source node carries the bad signal
    }
  }
}

TEST_CASE("node hook sees processors in topological order and its edits stick") {
  Graph g = fixture("fig1.json");
  const auto stems = make_stems(Task::singing, 2, kLen);
  std::vector<int> seen;
  const AudioBuffer y = render(g, bind_sources(g, stems, kLen), kLen,
                               [&](Node& n, std::span<const AudioBuffer* const> inlets) {
                                 seen.push_back(n.id);
                                 REQUIRE(inlets.size() == n.spec().inlets.size());
                                 REQUIRE(inlets[0] != nullptr);
                                 if (n.type == id_of(Proc::distortion)) n.set_param("gain", 0.1);
                               });
  CHECK(seen == std::vector<int>{1, 2, 3, 4});
  CHECK(g.node(2).param("gain") == 0.1);
  CHECK(g.node(3).param("gain") == 0.1);
  // Rendering the edited graph reproduces the hooked render.
  CHECK(render(RenderRequest{g, bind_sources(g, stems, kLen), kLen}) == y);
}

TEST_CASE("bind_sources fills missing stems with silence") {
  const Graph g = fixture("drum_bus.json");
  std::map<std::string, AudioBuffer> stems{{"kick", make_stem("kick", 3, kLen)}};
  const SourceMap m = bind_sources(g, stems, kLen);
  CHECK(m.size() == 4);
  CHECK(m.at(0) == stems.at("kick"));
  CHECK(m.at(1).is_silent());
  CHECK_THROWS_AS(bind_sources(g, {{"kick", AudioBuffer(10)}}, kLen), Error);
}
