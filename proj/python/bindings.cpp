#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "graphfx/canonicalize.hpp"
#include "graphfx/errors.hpp"
#include "graphfx/graph_io.hpp"
#include "graphfx/metrics.hpp"
#include "graphfx/renderer.hpp"
#include "graphfx/stems.hpp"
#include "graphfx/synthgen.hpp"
#include "graphfx/tokenizer.hpp"
#include "graphfx/validate.hpp"
#include "graphfx/wav.hpp"

namespace py = pybind11;
using namespace graphfx;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// (2, n) float64 array; a 1-d array is treated as mono.
AudioBuffer to_buffer(const Array& a) {
  if (a.ndim() == 1) {
    AudioBuffer b(static_cast<std::size_t>(a.shape(0)));
    auto r = a.unchecked<1>();
    for (py::ssize_t n = 0; n < a.shape(0); ++n) b.at(0, n) = b.at(1, n) = r(n);
    return b;
  }
  if (a.ndim() != 2 || a.shape(0) != 2) throw py::value_error("audio must have shape (2, n) or (n,)");
  AudioBuffer b(static_cast<std::size_t>(a.shape(1)));
  auto r = a.unchecked<2>();
  for (py::ssize_t c = 0; c < 2; ++c)
    for (py::ssize_t n = 0; n < a.shape(1); ++n) b.at(c, n) = r(c, n);
  return b;
}

Array to_array(const AudioBuffer& b) {
  Array a({py::ssize_t{2}, static_cast<py::ssize_t>(b.length())});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t c = 0; c < kChannels; ++c)
    for (std::size_t n = 0; n < b.length(); ++n) w(c, n) = b.at(c, n);
  return a;
}

std::map<std::string, AudioBuffer> to_stems(const std::map<std::string, Array>& in) {
  std::map<std::string, AudioBuffer> out;
  for (const auto& [k, v] : in) out.emplace(k, to_buffer(v));
  return out;
}

std::map<std::string, Array> to_arrays(const std::map<std::string, AudioBuffer>& in) {
  std::map<std::string, Array> out;
  for (const auto& [k, v] : in) out.emplace(k, to_array(v));
  return out;
}

py::dict token_dict(const Token& t, Task task) {
  py::dict d;
  switch (t.type) {
    case TokenType::start:
      d["t"] = "S";
      d["task"] = std::string(task_name(task));
      break;
    case TokenType::end:
      d["t"] = "E";
      break;
    case TokenType::node:
      d["t"] = "N";
      d["ids"] = py::list(py::make_tuple(t.ids[0]));
      d["ntype"] = t.node_type;
      break;
    case TokenType::edge:
      d["t"] = "E2";
      d["ids"] = py::list(py::make_tuple(t.ids[0], t.ids[1]));
      d["etype"] = t.edge_type;
      break;
  }
  return d;
}

TokenSequence sequence_from_jsonl(const std::string& text) {
  std::istringstream is(text);
  auto seqs = read_tokens(is);
  if (seqs.size() != 1) throw ParseError("expected exactly one token sequence");
  return seqs.front();
}

py::dict report_dict(const MetricsReport& r) {
  auto opt = [](const std::optional<double>& v) -> py::object {
    return v ? py::object(py::float_(*v)) : py::object(py::none());
  };
  py::dict d;
  d["node_error_rate"] = r.node_error_rate;
  d["edge_error_rate"] = r.edge_error_rate;
  d["invalid_rate"] = r.invalid_rate;
  d["iou"] = r.iou;
  d["parameter_loss"] = opt(r.parameter_loss);
  d["mss_default"] = opt(r.mss_default);
  d["mss_oracle"] = opt(r.mss_oracle);
  d["mss_full"] = opt(r.mss_full);
  d["count"] = r.count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "graphfx engine bindings; graphs travel as JSON text";

  // Same hierarchy as the C++ errors: everything derives from GraphfxError.
  const py::object base = py::register_exception<Error>(m, "GraphfxError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<InvalidGraphError>(m, "InvalidGraphError", base);
  py::register_exception<NumericError>(m, "NumericError", base);
  py::register_exception<GenerationError>(m, "GenerationError", base);

  m.attr("SAMPLE_RATE") = kSampleRate;
  m.attr("SEGMENT_LENGTH") = kDefaultSegmentLength;

  m.def("processor_names", [] {
    std::vector<std::string> out;
    for (const auto& s : Registry::instance().specs()) out.push_back(s.name);
    return out;
  }, "Node type names in type-id order.");
  m.def("edge_types", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : Registry::instance().edge_types()) out.emplace_back(e.outlet, e.inlet);
    return out;
  }, "(outlet, inlet) pairs in edge-type-id order.");

  m.def("canonical_json", [](const std::string& g) { return save_graph(load_graph(g)); },
        py::arg("graph_json"));
  m.def("validate", [](const std::string& g) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& v : validate(load_graph(g)).violations)
      out.emplace_back(std::string(code_name(v.code)), v.detail);
    return out;
  }, py::arg("graph_json"), "List of (code, detail); empty when valid.");
  m.def("lti_reorder", [](const std::string& g, bool structural) {
    return save_graph(lti_reorder(load_graph(g), structural ? LtiPolicy::structural : LtiPolicy::exact));
  }, py::arg("graph_json"), py::arg("structural") = false);
  m.def("export_dot", [](const std::string& g) { return export_dot(load_graph(g)); },
        py::arg("graph_json"));

  m.def("render", [](const std::string& g, const std::map<std::string, Array>& stems,
                     std::size_t length, bool default_params) {
    const Graph graph = load_graph(g);
    const auto sources = bind_sources(graph, to_stems(stems), length);
    py::gil_scoped_release release;
    AudioBuffer y = default_params ? render_with_default_params(graph, sources, length)
                                   : render(RenderRequest{graph, sources, length});
    py::gil_scoped_acquire acquire;
    return to_array(y);
  }, py::arg("graph_json"), py::arg("stems"), py::arg("length") = kDefaultSegmentLength,
     py::arg("default_params") = false, "Stems are keyed by source type name.");

  m.def("to_tokens", [](const std::string& g) {
    const auto seq = to_tokens(load_graph(g));
    py::list out;
    for (const auto& t : seq.tokens) out.append(token_dict(t, seq.task));
    return out;
  }, py::arg("graph_json"));
  m.def("tokens_jsonl", [](const std::string& g) {
    std::ostringstream os;
    write_tokens(os, to_tokens(load_graph(g)));
    return os.str();
  }, py::arg("graph_json"));
  m.def("from_tokens", [](const std::string& jsonl) {
    TokenSequence seq;
    try {
      seq = sequence_from_jsonl(jsonl);
    } catch (const ParseError&) {
      // A sequence cut off before its end token (a decoder that hit its
      // length limit) is a malformed graph, not a file format error.
      seq = sequence_from_jsonl(jsonl + "\n{\"t\":\"E\"}\n");
      seq.tokens.pop_back();
    }
    const auto d = from_tokens(seq);
    py::object graph = d.graph ? py::object(py::str(save_graph(*d.graph))) : py::object(py::none());
    return py::make_tuple(graph, std::string(diagnosis_name(d.diagnosis)), d.detail);
  }, py::arg("tokens_jsonl"), "(graph_json or None, diagnosis, detail)");

  m.def("mss", [](const Array& a, const Array& b) { return mss(to_buffer(a), to_buffer(b)); });
  m.def("node_type_iou", [](const std::string& p, const std::string& g) {
    return node_type_iou(load_graph(p), load_graph(g));
  });
  m.def("parameter_loss", [](const std::string& p, const std::string& g) {
    return parameter_loss(load_graph(p), load_graph(g));
  });
  m.def("sequence_error_rates", [](const std::string& pred_jsonl, const std::string& gt_jsonl) {
    const auto r = sequence_error_rates(sequence_from_jsonl(pred_jsonl), sequence_from_jsonl(gt_jsonl));
    return py::make_tuple(r.node, r.edge);
  });
  m.def("evaluate", [](const std::string& gt_json, std::optional<std::string> pred_json,
                       std::optional<std::string> oracle_json,
                       const std::map<std::string, Array>& stems, std::size_t length) {
    const Graph gt = load_graph(gt_json);
    std::optional<Graph> pred, oracle;
    if (pred_json) pred = load_graph(*pred_json);
    if (oracle_json) oracle = load_graph(*oracle_json);
    EvalRequest req;
    req.gt = &gt;
    req.pred_full = pred ? &*pred : nullptr;
    req.pred_oracle = oracle ? &*oracle : nullptr;
    req.stems = to_stems(stems);
    req.length = length;
    return report_dict(evaluate(req));
  }, py::arg("gt_json"), py::arg("pred_json"), py::arg("oracle_json"), py::arg("stems"),
     py::arg("length") = kDefaultSegmentLength);

  m.def("make_stems", [](const std::string& task, std::uint64_t seed, std::size_t length) {
    auto t = parse_task(task);
    if (!t) throw py::value_error("unknown task");
    return to_arrays(make_stems(*t, seed, length, false));
  }, py::arg("task"), py::arg("seed"), py::arg("length") = kDefaultSegmentLength);
  m.def("generate_pair", [](const std::string& task, std::uint64_t seed, std::uint64_t index,
                            std::size_t length) {
    GenConfig cfg;
    auto t = parse_task(task);
    if (!t) throw py::value_error("unknown task");
    cfg.task = *t;
    cfg.seed = seed;
    cfg.length = length;
    GeneratedPair p;
    {
      py::gil_scoped_release release;
      p = generate_pair(cfg, index);
    }
    py::dict d;
    d["graph"] = save_graph(p.graph);
    d["audio"] = to_array(p.audio);
    d["stems"] = to_arrays(p.stems);
    return d;
  }, py::arg("task"), py::arg("seed"), py::arg("index"),
     py::arg("length") = kDefaultSegmentLength);
  m.def("cumulative_energy_band", [](const Array& a, double lo, double hi) {
    const auto b = cumulative_energy_band(to_buffer(a), lo, hi);
    return py::make_tuple(b.lo, b.hi);
  }, py::arg("audio"), py::arg("lo") = 0.2, py::arg("hi") = 0.8);

  m.def("read_wav", [](const std::string& path) { return to_array(read_wav(path)); });
  m.def("write_wav", [](const std::string& path, const Array& a) { write_wav(path, to_buffer(a)); });
}
