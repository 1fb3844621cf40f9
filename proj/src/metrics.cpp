#include "graphfx/metrics.hpp"

#include <limits>

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "graphfx/errors.hpp"
#include "graphfx/fft.hpp"
#include "graphfx/renderer.hpp"
#include "graphfx/validate.hpp"

namespace graphfx {

namespace {

bool node_stream(const Token& t) { return t.type != TokenType::edge; }

ErrorRates rates(std::size_t node_err, std::size_t node_n, std::size_t edge_err,
                 std::size_t edge_n) {
  return {node_n ? static_cast<double>(node_err) / static_cast<double>(node_n) : 0.0,
          edge_n ? static_cast<double>(edge_err) / static_cast<double>(edge_n) : 0.0};
}

std::vector<TypeId> types_of(const Graph& g, const std::vector<int>& ids) {
  std::vector<TypeId> out;
  for (int id : ids) out.push_back(g.node(id).type);
  return out;
}

// key -1 is the bus; otherwise the track's source type.
std::map<int, std::vector<TypeId>> subgraph_types(const Graph& g) {
  const auto part = partition_subgraphs(g);
  std::map<int, std::vector<TypeId>> out;
  if (!part.bus.empty()) out[-1] = types_of(g, part.bus);
  for (const auto& [type, ids] : part.tracks) out[type] = types_of(g, ids);
  return out;
}

// |STFT| frames of one channel, frames x bins, row-major.
std::vector<double> stft_magnitude(std::span<const double> x, std::size_t n, std::size_t& frames) {
  const std::size_t hop = n / 4;
  const auto window = hann_window(n);
  const RealFft fft(n);
  frames = x.size() < n ? 1 : 1 + (x.size() - n) / hop;
  std::vector<double> out(frames * fft.bins());
  std::vector<double> buf(n);
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = f * hop + i;
      buf[i] = idx < x.size() ? x[idx] * window[i] : 0.0;
    }
    fft.forward(buf, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) out[f * fft.bins() + k] = std::sqrt(std::norm(spec[k]));
  }
  return out;
}

}  // namespace

ErrorRates token_error_rates(std::span<const Token> pred, const TokenSequence& gt) {
  if (pred.size() != gt.tokens.size())
    throw Error("prediction has " + std::to_string(pred.size()) + " steps, ground truth has " +
                std::to_string(gt.tokens.size()));
  std::size_t ne = 0, nn = 0, ee = 0, en = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool wrong = !(pred[i] == gt.tokens[i]);
    if (node_stream(gt.tokens[i])) {
      ++nn;
      ne += wrong;
    } else {
      ++en;
      ee += wrong;
    }
  }
  return rates(ne, nn, ee, en);
}

ErrorRates sequence_error_rates(const TokenSequence& pred, const TokenSequence& gt) {
  std::size_t ne = 0, nn = 0, ee = 0, en = 0;
  for (std::size_t i = 0; i < gt.tokens.size(); ++i) {
    const bool wrong = i >= pred.tokens.size() || !(pred.tokens[i] == gt.tokens[i]);
    if (node_stream(gt.tokens[i])) {
      ++nn;
      ne += wrong;
    } else {
      ++en;
      ee += wrong;
    }
  }
  return rates(ne, nn, ee, en);
}

double invalid_rate(std::span<const DecodeResult> decoded) {
  if (decoded.empty()) return 0.0;
  std::size_t bad = 0;
  for (const auto& d : decoded) bad += !d.ok();
  return static_cast<double>(bad) / static_cast<double>(decoded.size());
}

double multiset_iou(std::vector<TypeId> a, std::vector<TypeId> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<TypeId> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  const std::size_t uni = a.size() + b.size() - inter.size();
  return static_cast<double>(inter.size()) / static_cast<double>(uni);
}

double node_type_iou(const Graph& pred, const Graph& gt) {
  if (gt.task == Task::singing) {
    std::vector<TypeId> a, b;
    for (const auto& n : pred.nodes) a.push_back(n.type);
    for (const auto& n : gt.nodes) b.push_back(n.type);
    return multiset_iou(std::move(a), std::move(b));
  }
  const auto p = subgraph_types(pred);
  const auto g = subgraph_types(gt);
  std::map<int, int> keys;
  for (const auto& [k, v] : p) keys[k];
  for (const auto& [k, v] : g) keys[k];
  if (keys.empty()) return 1.0;
  double sum = 0.0;
  for (const auto& [k, unused] : keys) {
    auto ip = p.find(k);
    auto ig = g.find(k);
    sum += multiset_iou(ip == p.end() ? std::vector<TypeId>{} : ip->second,
                        ig == g.end() ? std::vector<TypeId>{} : ig->second);
  }
  return sum / static_cast<double>(keys.size());
}

MssReference::MssReference(const AudioBuffer& a) : length_(a.length()) {
  for (std::size_t n : kMssScales) {
    for (std::size_t c = 0; c < kChannels; ++c) {
      std::size_t frames = 0;
      auto m = stft_magnitude(a.channel(c), n, frames);
      std::vector<double> l(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) l[i] = std::log(m[i] + kMssEps);
      mag_.push_back(std::move(m));
      log_.push_back(std::move(l));
    }
  }
}

double MssReference::accumulate(const AudioBuffer& b, double stop_at) const {
  if (b.length() != length_)
    throw Error("mss: lengths differ (" + std::to_string(length_) + " vs " +
                std::to_string(b.length()) + ")");
  double total = 0.0;
  std::size_t slot = 0;
  for (std::size_t n : kMssScales) {
    for (std::size_t c = 0; c < kChannels; ++c, ++slot) {
      std::size_t frames = 0;
      const auto sb = stft_magnitude(b.channel(c), n, frames);
      const auto& sa = mag_[slot];
      const auto& la = log_[slot];
      double lin = 0.0, lg = 0.0;
      for (std::size_t i = 0; i < sa.size(); ++i) {
        lin += std::abs(sa[i] - sb[i]);
        lg += std::abs(la[i] - std::log(sb[i] + kMssEps));
      }
      total += (lin + lg) / static_cast<double>(sa.size());
      if (total > stop_at) return total;
    }
  }
  return total;
}

double MssReference::distance(const AudioBuffer& b) const {
  return accumulate(b, std::numeric_limits<double>::infinity()) /
         static_cast<double>(kMssScales.size() * kChannels);
}

bool MssReference::exceeds(const AudioBuffer& b, double threshold) const {
  const double scaled = threshold * static_cast<double>(kMssScales.size() * kChannels);
  return accumulate(b, scaled) > scaled;
}

double mss(const AudioBuffer& a, const AudioBuffer& b) {
  if (a.length() != b.length())
    throw Error("mss: lengths differ (" + std::to_string(a.length()) + " vs " +
                std::to_string(b.length()) + ")");
  return MssReference(a).distance(b);
}

bool same_structure(const Graph& a, const Graph& b) {
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].id != b.nodes[i].id || a.nodes[i].type != b.nodes[i].type) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& x = a.edges[i];
    const Edge& y = b.edges[i];
    if (x.src != y.src || x.dst != y.dst || x.outlet != y.outlet || x.inlet != y.inlet)
      return false;
  }
  return true;
}

double parameter_loss(const Graph& pred, const Graph& gt) {
  if (!same_structure(pred, gt))
    throw Error("parameter loss needs the ground-truth structure on both sides");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < gt.nodes.size(); ++i) {
    const auto& p = pred.nodes[i].params;
    const auto& q = gt.nodes[i].params;
    if (p.size() != q.size()) throw Error("parameter count mismatch");
    for (std::size_t k = 0; k < q.size(); ++k) sum += std::abs(p[k] - q[k]);
    count += q.size();
  }
  for (std::size_t i = 0; i < gt.edges.size(); ++i)
    sum += std::abs(pred.edges[i].gain - gt.edges[i].gain) / kMaxEdgeGain;
  count += gt.edges.size();
  return count ? sum / static_cast<double>(count) : 0.0;
}

MetricsReport evaluate(const EvalRequest& req) {
  if (!req.gt) throw Error("evaluate needs a ground-truth graph");
  const Graph& gt = *req.gt;
  require_valid(gt);
  MetricsReport r;

  const Graph* full = req.pred_full;
  if (full && !validate(*full).valid()) full = nullptr;
  r.invalid_rate = full ? 0.0 : 1.0;

  const TokenSequence gt_tokens = to_tokens(gt);
  ErrorRates er;
  if (!req.teacher_forced.empty()) {
    er = token_error_rates(req.teacher_forced, gt_tokens);
  } else if (full) {
    er = sequence_error_rates(to_tokens(*full), gt_tokens);
  } else if (req.pred_tokens) {
    er = sequence_error_rates(*req.pred_tokens, gt_tokens);
  } else {
    er = sequence_error_rates(TokenSequence{}, gt_tokens);
  }
  r.node_error_rate = er.node;
  r.edge_error_rate = er.edge;
  r.iou = full ? node_type_iou(*full, gt) : 0.0;

  const auto gt_sources = bind_sources(gt, req.stems, req.length);
  const AudioBuffer gt_full = render(RenderRequest{gt, gt_sources, req.length});
  if (full) {
    const auto sources = bind_sources(*full, req.stems, req.length);
    r.mss_default = mss(render_with_default_params(gt, gt_sources, req.length),
                        render_with_default_params(*full, sources, req.length));
    r.mss_full = mss(gt_full, render(RenderRequest{*full, sources, req.length}));
  }
  if (req.pred_oracle && same_structure(*req.pred_oracle, gt)) {
    r.parameter_loss = parameter_loss(*req.pred_oracle, gt);
    r.mss_oracle = mss(gt_full, render(RenderRequest{*req.pred_oracle, gt_sources, req.length}));
  }
  return r;
}

MetricsReport aggregate(std::span<const MetricsReport> reports) {
  MetricsReport out;
  out.count = 0;
  if (reports.empty()) return out;
  double ner = 0, eer = 0, inv = 0, iou = 0;
  std::size_t total = 0;
  struct Mean {
    double sum = 0.0;
    std::size_t n = 0;
    void add(const std::optional<double>& v, std::size_t w) {
      if (v) {
        sum += *v * static_cast<double>(w);
        n += w;
      }
    }
    std::optional<double> get() const {
      return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
  } pl, md, mo, mf;
  for (const auto& r : reports) {
    const auto w = static_cast<double>(r.count);
    ner += r.node_error_rate * w;
    eer += r.edge_error_rate * w;
    inv += r.invalid_rate * w;
    iou += r.iou * w;
    total += r.count;
    pl.add(r.parameter_loss, r.count);
    md.add(r.mss_default, r.count);
    mo.add(r.mss_oracle, r.count);
    mf.add(r.mss_full, r.count);
  }
  const auto n = static_cast<double>(total);
  out.node_error_rate = ner / n;
  out.edge_error_rate = eer / n;
  out.invalid_rate = inv / n;
  out.iou = iou / n;
  out.parameter_loss = pl.get();
  out.mss_default = md.get();
  out.mss_oracle = mo.get();
  out.mss_full = mf.get();
  out.count = total;
  return out;
}

std::string report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };
  j["node_error_rate"] = r.node_error_rate;
  j["edge_error_rate"] = r.edge_error_rate;
  j["invalid_rate"] = r.invalid_rate;
  j["iou"] = r.iou;
  j["parameter_loss"] = opt(r.parameter_loss);
  j["mss_default"] = opt(r.mss_default);
  j["mss_oracle"] = opt(r.mss_oracle);
  j["mss_full"] = opt(r.mss_full);
  j["count"] = r.count;
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(std::string_view text) {
  MetricsReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    auto opt = [&](const char* key) -> std::optional<double> {
      if (!j.contains(key) || j[key].is_null()) return std::nullopt;
      return j[key].get<double>();
    };
    r.node_error_rate = j.at("node_error_rate").get<double>();
    r.edge_error_rate = j.at("edge_error_rate").get<double>();
    r.invalid_rate = j.at("invalid_rate").get<double>();
    r.iou = j.at("iou").get<double>();
    r.parameter_loss = opt("parameter_loss");
    r.mss_default = opt("mss_default");
    r.mss_oracle = opt("mss_oracle");
    r.mss_full = opt("mss_full");
    r.count = j.value("count", std::size_t{1});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("metrics report: ") + e.what());
  }
  return r;
}

}  // namespace graphfx
