#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "graphfx/errors.hpp"
#include "graphfx/graph_io.hpp"
#include "graphfx/metrics.hpp"
#include "graphfx/renderer.hpp"
#include "graphfx/stems.hpp"
#include "graphfx/synthgen.hpp"
#include "oracles.hpp"

using namespace graphfx;
using Catch::Approx;

namespace {

Graph fixture(const std::string& name) { return load_graph_file(oracle::fixture_path(name)); }

// in -> bell -> out: five normalized values (three params, two gains / 2).
Graph bell_graph() {
  Graph g;
  const int in = g.add_node(Proc::in);
  const int bell = g.add_node(Proc::bell);
  g.connect(in, "out", bell, "in");
  g.connect(bell, "out", g.add_node(Proc::out), "in");
  return g;
}

std::vector<DecodeResult> decoded(int valid, int cyclic) {
  std::vector<DecodeResult> out;
  for (int i = 0; i < valid; ++i) out.push_back(from_tokens(to_tokens(fixture("fig1.json"))));
  for (int i = 0; i < cyclic; ++i) {
    DecodeResult d;
    d.diagnosis = Diagnosis::cyclic;
    out.push_back(d);
  }
  return out;
}

}  // namespace

TEST_CASE("teacher-forced error rates") {
  const TokenSequence gt = to_tokens(fixture("fig1.json"));
  std::vector<Token> pred = gt.tokens;
  CHECK(token_error_rates(pred, gt).node == 0.0);
  CHECK(token_error_rates(pred, gt).edge == 0.0);

  // Fig. 1 has 8 node-stream steps (S, 6 nodes, E) and 6 edges.
  std::size_t node_steps = 0;
  for (const auto& t : gt.tokens) node_steps += t.type != TokenType::edge;
  REQUIRE(node_steps == 8);
  pred[2].node_type = id_of(Proc::bell);
  auto r = token_error_rates(pred, gt);
  CHECK(r.node == Approx(1.0 / 8.0));
  CHECK(r.edge == 0.0);
  pred[9].edge_type += 1;
  pred[10].ids[0] = 0;
  r = token_error_rates(pred, gt);
  CHECK(r.edge == Approx(2.0 / 6.0));

  // A wrong token type counts even when the ids match.
  pred = gt.tokens;
  pred.back() = Token::start();
  CHECK(token_error_rates(pred, gt).node == Approx(1.0 / 8.0));

  pred.pop_back();
  CHECK_THROWS_AS(token_error_rates(pred, gt), Error);
}

TEST_CASE("one wrong node among ten node steps") {
  // S, 8 nodes, E: ten node-stream steps.
  Graph g;
  int prev = g.add_node(Proc::in);
  for (int i = 0; i < 6; ++i) {
    const int id = g.add_node(Proc::distortion);
    g.connect(prev, "out", id, "in");
    prev = id;
  }
  g.connect(prev, "out", g.add_node(Proc::out), "in");
  const TokenSequence gt = to_tokens(g);
  std::vector<Token> pred = gt.tokens;
  for (auto& t : pred)
    if (t.type == TokenType::node && t.node_type == id_of(Proc::distortion)) {
      t.node_type = id_of(Proc::bitcrush);
      break;
    }
  const auto r = token_error_rates(pred, gt);
  CHECK(r.node == Approx(0.1));
  CHECK(r.edge == 0.0);
}

TEST_CASE("free-running error rates") {
  const TokenSequence gt = to_tokens(fixture("fig1.json"));
  CHECK(sequence_error_rates(gt, gt).node == 0.0);
  const auto empty = sequence_error_rates(TokenSequence{}, gt);
  CHECK(empty.node == 1.0);
  CHECK(empty.edge == 1.0);
  TokenSequence longer = gt;
  longer.tokens.push_back(Token::end());
  CHECK(sequence_error_rates(longer, gt).node == 0.0);
}

TEST_CASE("invalid rate") {
  CHECK(invalid_rate(decoded(8, 0)) == 0.0);
  CHECK(invalid_rate(decoded(7, 1)) == 0.125);
  CHECK(invalid_rate(decoded(0, 3)) == 1.0);
  CHECK(invalid_rate({}) == 0.0);
}

TEST_CASE("node type IOU") {
  const auto bell = id_of(Proc::bell), low = id_of(Proc::lowpass), high = id_of(Proc::highshelf);
  CHECK(multiset_iou({bell, low}, {bell, high}) == Approx(1.0 / 3.0));
  CHECK(multiset_iou({bell, bell}, {low}) == 0.0);
  CHECK(multiset_iou({bell, bell, low}, {bell, bell, low}) == 1.0);
  // {b, b, b, l} vs {b, b, b}: 3 / 4
  CHECK(multiset_iou({bell, bell, bell, low}, {bell, bell, bell}) == Approx(0.75));
  CHECK(multiset_iou({}, {}) == 1.0);

  const Graph fig1 = fixture("fig1.json");
  CHECK(node_type_iou(fig1, fig1) == 1.0);
  const Graph drum = fixture("drum_bus.json");
  CHECK(node_type_iou(drum, drum) == 1.0);

  // Drum: the bus and each track weigh equally; a missing track scores 0.
  const Graph single = fixture("validation/v09_drum_single.json");
  const double iou = node_type_iou(single, drum);
  CHECK(iou >= 0.0);
  CHECK(iou < 1.0);
  CHECK(node_type_iou(drum, single) == Approx(iou));
}

TEST_CASE("mss matches the direct DFT oracle") {
  Rng rng(1);
  for (std::size_t len : {std::size_t{4096}, std::size_t{3000}, std::size_t{100}}) {
    INFO(len);
    const AudioBuffer a = oracle::white_noise(rng, len);
    const AudioBuffer b = oracle::white_noise(rng, len, 0.2);
    CHECK(mss(a, b) == Approx(oracle::mss_naive(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("mss basic properties") {
  Rng rng(2);
  const AudioBuffer a = oracle::white_noise(rng, 8192);
  const AudioBuffer b = oracle::white_noise(rng, 8192);
  CHECK(mss(a, a) == 0.0);
  CHECK(mss(a, b) == mss(b, a));
  CHECK(mss(a, b) > 0.0);
  CHECK_THROWS_AS(mss(a, AudioBuffer(100)), Error);

  const MssReference ref(a);
  CHECK(ref.distance(b) == mss(a, b));
  const double d = mss(a, b);
  CHECK(ref.exceeds(b, d * 0.5));
  CHECK_FALSE(ref.exceeds(b, d * 2.0));
  CHECK_FALSE(ref.exceeds(a, 0.0));
}

TEST_CASE("mss of a signal against twice itself") {
  // |2S| - |S| = |S| and log(2|S| + eps) - log(|S| + eps), per bin.
  Rng rng(3);
  constexpr std::size_t kLen = 4096;
  const AudioBuffer a = oracle::white_noise(rng, kLen);
  AudioBuffer twice(kLen);
  twice.add_scaled(a, 2.0);

  double expected = 0.0;
  for (std::size_t n : {2048, 1024, 512, 256, 128, 64}) {
    const std::size_t hop = n / 4;
    for (std::size_t c = 0; c < 2; ++c) {
      double acc = 0.0;
      std::size_t count = 0;
      for (std::size_t start = 0; start + n <= kLen; start += hop) {
        std::vector<double> frame(n);
        for (std::size_t i = 0; i < n; ++i)
          frame[i] = a.at(c, start + i) * (0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
        for (double m : oracle::dft_magnitudes(frame)) {
          acc += m + std::log((2.0 * m + 1e-7) / (m + 1e-7));
          ++count;
        }
      }
      expected += acc / static_cast<double>(count);
    }
  }
  expected /= 12.0;
  CHECK(mss(a, twice) == Approx(expected).epsilon(1e-9));
  // Far above eps the log term is log 2.
  CHECK(mss(a, twice) > std::log(2.0));
}

TEST_CASE("parameter loss") {
  Graph g = bell_graph();
  CHECK(parameter_loss(g, g) == 0.0);

  Graph zeros = g, ones = g;
  for (auto& n : zeros.nodes) std::fill(n.params.begin(), n.params.end(), 0.0);
  for (auto& n : ones.nodes) std::fill(n.params.begin(), n.params.end(), 1.0);
  for (auto& e : zeros.edges) e.gain = 0.0;
  for (auto& e : ones.edges) e.gain = 2.0;
  CHECK(parameter_loss(zeros, ones) == Approx(1.0));

  Graph off = g;
  off.node(1).params[0] += 0.25;
  g.node(1).params[0] -= 0.25;
  CHECK(parameter_loss(off, g) == Approx(0.1));

  Graph other = g;
  other.nodes[1].type = id_of(Proc::lowshelf);
  CHECK_FALSE(same_structure(other, g));
  CHECK_THROWS_AS(parameter_loss(other, g), Error);
}

TEST_CASE("evaluating ground truth against itself") {
  constexpr std::size_t kLen = 16384;
  for (const char* name : {"fig1.json", "drum_bus.json"}) {
    INFO(name);
    const Graph gt = fixture(name);
    EvalRequest req;
    req.gt = &gt;
    req.pred_full = &gt;
    req.pred_oracle = &gt;
    req.stems = make_stems(gt.task, 5, kLen, false);
    req.length = kLen;
    const MetricsReport r = evaluate(req);
    CHECK(r.node_error_rate == 0.0);
    CHECK(r.edge_error_rate == 0.0);
    CHECK(r.invalid_rate == 0.0);
    CHECK(r.iou == 1.0);
    REQUIRE(r.parameter_loss);
    CHECK(*r.parameter_loss == 0.0);
    REQUIRE(r.mss_default);
    REQUIRE(r.mss_oracle);
    REQUIRE(r.mss_full);
    CHECK(*r.mss_default < 1e-9);
    CHECK(*r.mss_oracle < 1e-9);
    CHECK(*r.mss_full < 1e-9);
  }
}

TEST_CASE("evaluating a default-param prediction") {
  constexpr std::size_t kLen = 16384;
  const Graph gt = fixture("fig1.json");
  const Graph pred = with_default_params(gt);
  const auto stems = make_stems(Task::singing, 6, kLen);
  EvalRequest req;
  req.gt = &gt;
  req.pred_full = &pred;
  req.pred_oracle = &pred;
  req.stems = stems;
  req.length = kLen;
  const MetricsReport r = evaluate(req);
  const SourceMap src = bind_sources(gt, stems, kLen);
  const double direct = mss(render(RenderRequest{gt, src, kLen}), render(RenderRequest{pred, src, kLen}));
  REQUIRE(r.mss_oracle);
  CHECK(*r.mss_oracle > 0.0);
  CHECK(*r.mss_oracle == Approx(direct).epsilon(1e-12));
  CHECK(*r.mss_full == Approx(direct).epsilon(1e-12));
  CHECK(*r.mss_default < 1e-9);  // same structure, same defaults
  CHECK(*r.parameter_loss == Approx(parameter_loss(pred, gt)));
  CHECK(r.iou == 1.0);
}

TEST_CASE("an invalid prediction has no full-graph scores") {
  constexpr std::size_t kLen = 8192;
  const Graph gt = fixture("fig1.json");
  const Graph bad = fixture("validation/c01_two_cycle.json");
  const TokenSequence half = [&] {
    TokenSequence s = to_tokens(gt);
    s.tokens.resize(s.tokens.size() / 2);
    return s;
  }();
  EvalRequest req;
  req.gt = &gt;
  req.pred_full = &bad;
  req.pred_tokens = &half;
  req.stems = make_stems(Task::singing, 7, kLen);
  req.length = kLen;
  const MetricsReport r = evaluate(req);
  CHECK(r.invalid_rate == 1.0);
  CHECK(r.iou == 0.0);
  CHECK_FALSE(r.mss_default);
  CHECK_FALSE(r.mss_full);
  CHECK_FALSE(r.mss_oracle);
  CHECK_FALSE(r.parameter_loss);
  CHECK(r.node_error_rate > 0.0);
  CHECK(r.node_error_rate < 1.0);
}

TEST_CASE("report JSON and aggregation") {
  MetricsReport a;
  a.node_error_rate = 0.25;
  a.iou = 0.5;
  a.mss_full = 2.0;
  a.parameter_loss = 0.1;
  MetricsReport b;
  b.invalid_rate = 1.0;
  b.iou = 0.0;
  b.count = 3;

  const std::string text = report_to_json(a);
  CHECK(text.find("\"mss_default\": null") != std::string::npos);
  const MetricsReport back = report_from_json(text);
  CHECK(back.node_error_rate == 0.25);
  CHECK(back.mss_full == 2.0);
  CHECK_FALSE(back.mss_default);
  CHECK(back.count == 1);
  CHECK_THROWS_AS(report_from_json("{}"), ParseError);
  CHECK_THROWS_AS(report_from_json("nope"), ParseError);

  const std::vector<MetricsReport> all = {a, b};
  const MetricsReport m = aggregate(all);
  CHECK(m.count == 4);
  CHECK(m.node_error_rate == Approx(0.0625));
  CHECK(m.invalid_rate == Approx(0.75));
  CHECK(m.iou == Approx(0.125));
  // b has no MSS; only a's counts.
  CHECK(m.mss_full == 2.0);
  CHECK_FALSE(m.mss_oracle);
  CHECK(aggregate({}).count == 0);
}

TEST_CASE("rates stay in [0, 1] under random corruption") {
  Rng rng(9);
  for (int i = 0; i < 300; ++i) {
    GenConfig cfg;
    cfg.task = i % 2 ? Task::drum : Task::singing;
    const TokenSequence gt = to_tokens(sample_prototype(cfg, rng));
    std::vector<Token> pred = gt.tokens;
    for (auto& t : pred)
      if (rng.bernoulli(0.2)) t.ids[0] += 1;
    const auto r = token_error_rates(pred, gt);
    CHECK(r.node >= 0.0);
    CHECK(r.node <= 1.0);
    CHECK(r.edge >= 0.0);
    CHECK(r.edge <= 1.0);
  }
}
