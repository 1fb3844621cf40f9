#include "graphfx/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>
#include <set>

#include "graphfx/canonicalize.hpp"
#include "graphfx/dsp/process.hpp"
#include "graphfx/errors.hpp"
#include "graphfx/fft.hpp"
#include "graphfx/metrics.hpp"
#include "graphfx/order.hpp"
#include "graphfx/stems.hpp"
#include "graphfx/validate.hpp"
#include "render_trace.hpp"

namespace graphfx {

namespace {

constexpr std::array<std::string_view, kNumMotifs> kMotifNames = {
    "parametric_eq", "serial_dynamics", "gated_reverb", "modulation",         "lfo_phaser",
    "delay_send",    "pitch_bank",      "multiband_distortion", "ms_imaging", "lofi"};

constexpr std::array<Proc, 10> kEqTypes = {
    Proc::lowpass,   Proc::bandpass, Proc::highpass,  Proc::bandreject, Proc::lowpass4,
    Proc::bandpass4, Proc::highpass4, Proc::lowshelf, Proc::highshelf,  Proc::bell};

constexpr std::array<Motif, kNumMotifs> kAllMotifs = {
    Motif::parametric_eq, Motif::serial_dynamics, Motif::gated_reverb, Motif::modulation,
    Motif::lfo_phaser,    Motif::delay_send,      Motif::pitch_bank,   Motif::multiband_distortion,
    Motif::ms_imaging,    Motif::lofi};

constexpr std::array<Motif, 4> kBusMotifs = {Motif::parametric_eq, Motif::serial_dynamics,
                                             Motif::multiband_distortion, Motif::ms_imaging};

struct Port {
  int node;
  std::string outlet;
};

template <class T, std::size_t N>
T pick(Rng& rng, const std::array<T, N>& items) {
  return items[static_cast<std::size_t>(rng.integer(0, static_cast<int>(N) - 1))];
}

class Builder {
 public:
  Builder(Graph& g, Rng& rng, const GenConfig& cfg) : g_(g), rng_(rng), cfg_(cfg) {}

  // Serial stack of `count` motifs from `pool` starting at `entry`. Audio
  // taps seen along the way may feed sidechains or envelope followers of
  // later motifs.
  Port chain(Port entry, int count, std::span<const Motif> pool, bool allow_multiband) {
    std::vector<Port> taps;
    Port cur = std::move(entry);
    for (int i = 0; i < count; ++i) {
      const std::size_t first_new = g_.nodes.size();
      if (allow_multiband && !cfg_.forced_motif && rng_.bernoulli(cfg_.multiband_prob)) {
        cur = multiband(cur, pool);
      } else {
        cur = motif(choose(pool), cur);
      }
      if (!taps.empty() && rng_.bernoulli(cfg_.aux_prob)) add_aux(taps, first_new);
      taps.push_back(cur);
    }
    return cur;
  }

 private:
  Motif choose(std::span<const Motif> pool) {
    if (cfg_.forced_motif) return *cfg_.forced_motif;
    return pool[static_cast<std::size_t>(rng_.integer(0, static_cast<int>(pool.size()) - 1))];
  }

  int add(Proc p) { return g_.add_node(p); }
  void connect(const Port& from, int dst, const std::string& inlet) {
    g_.connect(from.node, from.outlet, dst, inlet);
  }

  Port multiband(const Port& entry, std::span<const Motif> pool) {
    const int xo = add(Proc::crossover);
    connect(entry, xo, "in");
    const int mix = add(Proc::mix);
    // At least one band gets processing.
    const int forced = rng_.integer(0, 1);
    for (int band = 0; band < 2; ++band) {
      Port p{xo, band == 0 ? "low" : "high"};
      if (band == forced || rng_.bernoulli(0.5)) {
        std::vector<Motif> inner;
        for (Motif m : pool)
          if (m != Motif::multiband_distortion) inner.push_back(m);
        p = chain(p, 1, inner, false);
      }
      connect(p, mix, "in");
    }
    return {mix, "out"};
  }

  Port motif(Motif m, const Port& entry) {
    switch (m) {
      case Motif::parametric_eq: {
        Port cur = entry;
        const int n = rng_.integer(1, 3);
        for (int i = 0; i < n; ++i) {
          const int f = add(pick(rng_, kEqTypes));
          connect(cur, f, "in");
          cur = {f, "out"};
        }
        return cur;
      }
      case Motif::serial_dynamics: {
        const int comp = add(Proc::compressor);
        const int second = add(rng_.bernoulli(0.5) ? Proc::noisegate : Proc::expander);
        connect(entry, comp, "in");
        g_.connect(comp, "out", second, "in");
        return {second, "out"};
      }
      case Motif::gated_reverb: {
        const int rev = add(rng_.bernoulli(0.5) ? Proc::mono_reverb : Proc::stereo_reverb);
        const int gate = add(Proc::noisegate);
        connect(entry, rev, "in");
        g_.connect(rev, "out", gate, "in");
        connect(entry, gate, "sidechain");
        return {gate, "out"};
      }
      case Motif::modulation: {
        constexpr std::array<Proc, 3> effects = {Proc::chorus, Proc::flanger, Proc::vibrato};
        const int fx = add(pick(rng_, effects));
        const int lfo = add(rng_.bernoulli(0.5) ? Proc::lfo : Proc::stereo_lfo);
        connect(entry, fx, "in");
        g_.connect(lfo, "lfo", fx, "mod");
        return {fx, "out"};
      }
      case Motif::lfo_phaser: {
        const int ph = add(Proc::phaser);
        const int lfo = add(rng_.bernoulli(0.5) ? Proc::lfo : Proc::stereo_lfo);
        connect(entry, ph, "in");
        g_.connect(lfo, "lfo", ph, "mod");
        return {ph, "out"};
      }
      case Motif::delay_send: {
        constexpr std::array<Proc, 3> filters = {Proc::lowpass, Proc::highpass, Proc::bandpass};
        const int dl = add(rng_.bernoulli(0.5) ? Proc::mono_delay : Proc::pingpong_delay);
        const int f = add(pick(rng_, filters));
        const int mix = add(Proc::mix);
        connect(entry, dl, "in");
        g_.connect(dl, "out", f, "in");
        g_.connect(f, "out", mix, "in");
        connect(entry, mix, "in");
        return {mix, "out"};
      }
      case Motif::pitch_bank: {
        const int mix = add(Proc::mix);
        const int n = rng_.integer(2, 3);
        for (int i = 0; i < n; ++i) {
          const int ps = add(Proc::pitchshift);
          const int pan = add(Proc::panning);
          connect(entry, ps, "in");
          g_.connect(ps, "out", pan, "in");
          g_.connect(pan, "out", mix, "in");
        }
        connect(entry, mix, "in");
        return {mix, "out"};
      }
      case Motif::multiband_distortion: {
        const int xo = add(Proc::crossover);
        const int mix = add(Proc::mix);
        connect(entry, xo, "in");
        const int forced = rng_.integer(0, 1);
        for (int band = 0; band < 2; ++band) {
          const std::string outlet = band == 0 ? "low" : "high";
          if (band == forced || rng_.bernoulli(0.75)) {
            const int d = add(Proc::distortion);
            g_.connect(xo, outlet, d, "in");
            g_.connect(d, "out", mix, "in");
          } else {
            g_.connect(xo, outlet, mix, "in");
          }
        }
        if (rng_.bernoulli(0.3)) {
          const int lfo = add(rng_.bernoulli(0.5) ? Proc::lfo : Proc::stereo_lfo);
          g_.connect(lfo, "lfo", xo, "frequency");
        }
        return {mix, "out"};
      }
      case Motif::ms_imaging: {
        const int split = add(Proc::ms_split);
        const int merge = add(Proc::ms_merge);
        const int img = add(Proc::imager);
        connect(entry, split, "in");
        for (const char* ch : {"mid", "side"}) {
          if (rng_.bernoulli(0.6)) {
            const int f = add(pick(rng_, kEqTypes));
            g_.connect(split, ch, f, "in");
            g_.connect(f, "out", merge, ch);
          } else {
            g_.connect(split, ch, merge, ch);
          }
        }
        g_.connect(merge, "out", img, "in");
        return {img, "out"};
      }
      case Motif::lofi: {
        const int bc = add(Proc::bitcrush);
        const int dist = add(Proc::distortion);
        connect(entry, bc, "in");
        g_.connect(bc, "out", dist, "in");
        return {dist, "out"};
      }
    }
    throw Error("unknown motif");
  }

  // Connects an earlier tap to a free optional inlet among nodes created at
  // or after `first_new`: sidechains take the tap directly, modulation
  // inlets take an envelope follower on the tap or an LFO.
  void add_aux(const std::vector<Port>& taps, std::size_t first_new) {
    struct Slot {
      int node;
      std::string inlet;
      PortKind kind;
    };
    std::vector<Slot> slots;
    const Adjacency adj(g_);
    for (std::size_t i = first_new; i < g_.nodes.size(); ++i) {
      const Node& n = g_.nodes[i];
      for (const auto& in : n.spec().inlets) {
        if (!in.optional) continue;
        bool used = false;
        for (std::size_t e : adj.incoming(n.id)) used |= g_.edges[e].inlet == in.name;
        if (!used) slots.push_back({n.id, in.name, in.kind});
      }
    }
    if (slots.empty()) return;
    const Slot slot = slots[static_cast<std::size_t>(rng_.integer(0, static_cast<int>(slots.size()) - 1))];
    const Port& tap = taps[static_cast<std::size_t>(rng_.integer(0, static_cast<int>(taps.size()) - 1))];
    if (slot.kind == PortKind::audio) {
      connect(tap, slot.node, slot.inlet);
    } else if (rng_.bernoulli(0.5)) {
      const int env = add(Proc::envelope_follower);
      connect(tap, env, "in");
      g_.connect(env, "env", slot.node, slot.inlet);
    } else {
      const int lfo = add(rng_.bernoulli(0.5) ? Proc::lfo : Proc::stereo_lfo);
      g_.connect(lfo, "lfo", slot.node, slot.inlet);
    }
  }

  Graph& g_;
  Rng& rng_;
  const GenConfig& cfg_;
};

struct SilentInput {
  int node;
};

// Single-input, single-output processors whose effect the randomizer
// checks on the signal actually reaching them.
bool contribution_checked(const Node& node) {
  const auto& spec = node.spec();
  switch (spec.family) {
    case Family::low_order_filter:
    case Family::high_order_filter:
    case Family::nonlinear:
      return spec.outlets.size() == 1;
    default:
      return false;
  }
}

// True when the node, run alone on its inputs, changes the spectrum of its
// main input by more than kMinContribution (energy-matched MSS).
bool audible(const Node& node, std::span<const AudioBuffer* const> inlets, std::size_t length) {
  const AudioBuffer& x = *inlets[0];
  const AudioBuffer y = dsp::run_processor(node.type, node.params, inlets, length, true, node.id)[0];
  const double ex = x.energy();
  const double ey = y.energy();
  if (!(ex > 0.0) || !(ey > 0.0)) return true;
  AudioBuffer ref(length);
  ref.add_scaled(x, std::sqrt(ey / ex));
  return mss(ref, y) > kMinContribution;
}

}  // namespace

std::string_view motif_name(Motif m) { return kMotifNames[static_cast<std::size_t>(m)]; }

std::optional<Motif> parse_motif(std::string_view name) {
  for (std::size_t i = 0; i < kMotifNames.size(); ++i)
    if (kMotifNames[i] == name) return static_cast<Motif>(i);
  return std::nullopt;
}

void GenConfig::check() const {
  if (min_motifs < 1 || max_motifs < min_motifs) throw Error("bad singing motif count range");
  if (track_min_motifs < 1 || track_max_motifs < track_min_motifs)
    throw Error("bad track motif count range");
  if (bus_min_motifs < 1 || bus_max_motifs < bus_min_motifs)
    throw Error("bad bus motif count range");
  if (!(multiband_prob >= 0.0 && multiband_prob <= 1.0))
    throw Error("multiband probability outside [0, 1]");
  if (!(aux_prob >= 0.0 && aux_prob <= 1.0)) throw Error("aux probability outside [0, 1]");
  if (length == 0) throw Error("segment length must be positive");
}

Graph sample_prototype(const GenConfig& config, Rng& rng, std::span<const TypeId> active_sources) {
  config.check();
  Graph g;
  g.task = config.task;
  Builder b(g, rng, config);

  if (config.task == Task::singing) {
    const int src = g.add_node(Proc::in);
    const Port exit = b.chain({src, "out"}, rng.integer(config.min_motifs, config.max_motifs),
                              kAllMotifs, true);
    const int out = g.add_node(Proc::out);
    g.connect(exit.node, exit.outlet, out, "in");
  } else {
    std::vector<TypeId> tracks(active_sources.begin(), active_sources.end());
    if (tracks.empty()) {
      const auto all = Registry::instance().source_types(Task::drum);
      tracks.assign(all.begin(), all.end());
    }
    std::sort(tracks.begin(), tracks.end());
    tracks.erase(std::unique(tracks.begin(), tracks.end()), tracks.end());
    for (TypeId t : tracks)
      if (!Registry::instance().is_source(t) || t == id_of(Proc::in))
        throw Error("'" + spec_of(t).name + "' is not a drum source");

    std::vector<int> sources;
    for (TypeId t : tracks) sources.push_back(g.add_node(t));
    const int bus = g.add_node(Proc::mix);
    for (int src : sources) {
      const Port exit = b.chain({src, "out"},
                                rng.integer(config.track_min_motifs, config.track_max_motifs),
                                kAllMotifs, true);
      const int pan = g.add_node(Proc::panning);
      g.connect(exit.node, exit.outlet, pan, "in");
      g.connect(pan, "out", bus, "in");
    }
    const Port exit = b.chain({bus, "out"},
                              rng.integer(config.bus_min_motifs, config.bus_max_motifs),
                              kBusMotifs, false);
    const int out = g.add_node(Proc::out);
    g.connect(exit.node, exit.outlet, out, "in");
  }

  const auto report = validate(g);
  if (!report.valid())
    throw Error("generator produced an invalid graph: " + report.violations.front().detail);
  return lti_reorder(g);
}

EnergyBand cumulative_energy_band(const AudioBuffer& signal, double lo, double hi) {
  const std::size_t n = signal.length();
  if (n == 0 || signal.is_silent()) throw Error("energy band of a silent signal");
  const RealFft fft(n);
  std::vector<double> power(fft.bins(), 0.0);
  std::vector<std::complex<double>> spec(fft.bins());
  for (std::size_t c = 0; c < kChannels; ++c) {
    fft.forward(signal.channel(c), spec);
    for (std::size_t k = 0; k < spec.size(); ++k) power[k] += std::norm(spec[k]);
  }
  double total = 0.0;
  for (double p : power) total += p;
  if (!(total > 0.0)) throw Error("energy band of a silent signal");

  const double bin_hz = static_cast<double>(kSampleRate) / static_cast<double>(n);
  EnergyBand band{-1.0, -1.0};
  double acc = 0.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    acc += power[k];
    const double frac = acc / total;
    if (band.lo < 0.0 && frac >= lo) band.lo = static_cast<double>(k) * bin_hz;
    if (band.hi < 0.0 && frac >= hi) {
      band.hi = static_cast<double>(k) * bin_hz;
      break;
    }
  }
  if (band.hi < 0.0) band.hi = static_cast<double>(power.size() - 1) * bin_hz;
  if (band.lo < 0.0) band.lo = band.hi;
  return band;
}

std::vector<double> energy_envelope_db(const AudioBuffer& signal, std::size_t frame,
                                       std::size_t hop) {
  std::vector<double> out;
  const std::size_t n = signal.length();
  auto level = [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    for (std::size_t c = 0; c < kChannels; ++c)
      for (std::size_t i = begin; i < end; ++i) acc += signal.at(c, i) * signal.at(c, i);
    const double rms = std::sqrt(acc / static_cast<double>(kChannels * frame));
    return rms > 0.0 ? std::max(20.0 * std::log10(rms), -120.0) : -120.0;
  };
  if (n < frame) {
    out.push_back(level(0, n));
    return out;
  }
  for (std::size_t begin = 0; begin + frame <= n; begin += hop) out.push_back(level(begin, begin + frame));
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

std::optional<Graph> bypass_node(const Graph& g, int id) {
  const Node* node = g.find(id);
  if (!node) return std::nullopt;
  const auto family = node->spec().family;
  if (family == Family::source || family == Family::sink) return std::nullopt;

  Graph h;
  h.task = g.task;
  for (const auto& n : g.nodes)
    if (n.id != id) h.nodes.push_back(n);
  std::vector<Edge> feeds, consumers;
  for (const auto& e : g.edges) {
    if (e.dst == id) {
      if (e.inlet == "in") feeds.push_back(e);
    } else if (e.src == id) {
      consumers.push_back(e);
    } else {
      h.edges.push_back(e);
    }
  }
  for (const auto& c : consumers) {
    // A control outlet (envelope follower) leaves its target's inlet open.
    const auto& inlet = h.node(c.dst).spec().inlets[*h.node(c.dst).spec().inlet_index(c.inlet)];
    if (inlet.kind != PortKind::audio) continue;
    for (const auto& f : feeds) {
      const double gain = f.gain * c.gain;
      auto same = [&](const Edge& e) {
        return e.src == f.src && e.outlet == f.outlet && e.dst == c.dst && e.inlet == c.inlet;
      };
      auto it = std::find_if(h.edges.begin(), h.edges.end(), same);
      if (it != h.edges.end()) {
        it->gain = std::min(it->gain + gain, kMaxEdgeGain);
      } else {
        h.edges.push_back({f.src, f.outlet, c.dst, c.inlet, std::min(gain, kMaxEdgeGain)});
      }
    }
  }
  // Drop control generators that fed only the removed node.
  for (bool pruned = true; pruned;) {
    pruned = false;
    const Adjacency adj(h);
    for (std::size_t i = 0; i < h.nodes.size(); ++i) {
      const Node& n = h.nodes[i];
      if (n.spec().family != Family::control || !adj.outgoing(n.id).empty()) continue;
      const int gone = n.id;
      h.nodes.erase(h.nodes.begin() + static_cast<std::ptrdiff_t>(i));
      std::erase_if(h.edges, [&](const Edge& e) { return e.dst == gone; });
      pruned = true;
      break;
    }
  }
  if (!validate(h).valid()) return std::nullopt;
  return h;
}

namespace {

// `id` and every node reachable from it.
std::set<int> downstream(const Graph& g, int id) {
  const Adjacency adj(g);
  std::set<int> seen = {id};
  std::vector<int> stack = {id};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    for (std::size_t e : adj.outgoing(cur))
      if (seen.insert(g.edges[e].dst).second) stack.push_back(g.edges[e].dst);
  }
  return seen;
}

// Bypass renders only recompute what lies downstream of the bypassed node;
// everything else is read from `trace`, a recorded render of g.
std::vector<int> find_ghosts(const Graph& g, const SourceMap& sources, std::size_t length,
                             const AudioBuffer& rendered, const RenderTrace& trace,
                             double threshold, bool first_only) {
  std::vector<int> ghosts;
  const MssReference reference(rendered);
  for (int id : topological_order(g)) {
    if (g.node(id).spec().family == Family::utility) continue;
    auto h = bypass_node(g, id);
    if (!h) continue;
    const std::set<int> recompute = downstream(g, id);
    const AudioBuffer y = render_traced(*h, sources, length, {}, nullptr, &trace, &recompute);
    if (reference.exceeds(y, threshold)) continue;
    ghosts.push_back(id);
    if (first_only) break;
  }
  return ghosts;
}

}  // namespace

std::vector<int> ghost_nodes(const Graph& g, const SourceMap& sources, std::size_t length,
                             const AudioBuffer& rendered, double threshold) {
  Graph copy = g;
  RenderTrace trace;
  render_traced(copy, sources, length, {}, &trace, nullptr, nullptr);
  return find_ghosts(g, sources, length, rendered, trace, threshold, false);
}

Graph randomize_params(const Graph& proto, const SourceMap& sources, Rng& rng,
                       std::size_t length, AudioBuffer* rendered, bool reject_ghosts) {
  require_valid(proto);
  const auto& freq_desc = spec_of(id_of(Proc::lowpass)).params[0];
  std::string last_failure;
  Graph g = proto;
  // Nodes drawn on a repair pass; the rest keep their params. A fresh pass
  // draws everything.
  std::set<int> redraw;
  bool fresh = true;
  int last_ghost = -1;
  int streak = 0;
  for (int attempt = 0; attempt <= kMaxRandomizeRetries; ++attempt) {
    if (fresh) {
      g = proto;
      for (auto& e : g.edges) e.gain = rng.uniform(0.25, 1.0);
    }

    auto draw = [&](Node& node, std::span<const AudioBuffer* const> inlets) {
      for (double& p : node.params) p = rng.uniform();
      if (is_low_order_linear_filter(node.type)) {
        const AudioBuffer* in = inlets[0];
        if (!in || in->is_silent()) throw SilentInput{node.id};
        const EnergyBand band = cumulative_energy_band(*in);
        const double lo = std::max(band.lo, freq_desc.phys_min);
        const double hi = std::min(band.hi, freq_desc.phys_max);
        if (lo > hi) throw SilentInput{node.id};
        const auto idx = *node.spec().param_index("frequency");
        node.params[idx] = freq_desc.to_normalized(rng.log_uniform(lo, hi));
      } else if (is_dynamics_type(node.type)) {
        const AudioBuffer* det = inlets[1] ? inlets[1] : inlets[0];
        if (!det || det->is_silent()) throw SilentInput{node.id};
        const auto env = energy_envelope_db(*det);
        const auto& d = node.spec().params[0];
        const double lo = std::clamp(percentile(env, 25.0), d.phys_min, d.phys_max);
        const double hi = std::clamp(percentile(env, 90.0), d.phys_min, d.phys_max);
        node.params[0] = d.to_normalized(rng.uniform(lo, hi));
      } else if (node.type == id_of(Proc::distortion)) {
        // Drive loud passages to at least full scale so the shaper bends.
        const AudioBuffer* in = inlets[0];
        if (!in || in->is_silent()) throw SilentInput{node.id};
        const auto& d = node.spec().params[0];
        const double lo = std::clamp(-percentile(energy_envelope_db(*in), 90.0), d.phys_min, d.phys_max);
        node.params[0] = d.to_normalized(rng.uniform(lo, d.phys_max));
      }
    };

    auto hook = [&](Node& node, std::span<const AudioBuffer* const> inlets) {
      if (!fresh && !redraw.count(node.id)) return;
      draw(node, inlets);
      if (!contribution_checked(node)) return;
      for (int i = 0; i < kMaxContributionRedraws && !audible(node, inlets, length); ++i)
        draw(node, inlets);
    };

    AudioBuffer out;
    RenderTrace trace;
    try {
      out = render_traced(g, sources, length, hook, reject_ghosts ? &trace : nullptr, nullptr,
                          nullptr);
    } catch (const SilentInput& s) {
      last_failure = "node " + std::to_string(s.node) + " kept receiving silence";
      fresh = true;
      continue;
    }
    if (reject_ghosts) {
      const auto ghosts = find_ghosts(g, sources, length, out, trace, kGhostMss, true);
      if (!ghosts.empty()) {
        // Redraw the ghost and everything it feeds, edge gains included;
        // upstream params stay, so adaptive draws still see their inputs.
        last_failure = "node " + std::to_string(ghosts.front()) + " kept making no audible difference";
        // The same ghost after several redraws is masked by the structure
        // itself, e.g. a hat track under a low bus lowpass.
        streak = ghosts.front() == last_ghost ? streak + 1 : 1;
        last_ghost = ghosts.front();
        if (streak == kMaxGhostStreak) break;
        redraw = downstream(g, ghosts.front());
        for (auto& e : g.edges)
          if (redraw.count(e.src)) e.gain = rng.uniform(0.25, 1.0);
        fresh = false;
        continue;
      }
    }
    if (rendered) *rendered = std::move(out);
    return g;
  }
  throw GenerationError(last_failure);
}

GeneratedPair generate_pair(const GenConfig& config, std::uint64_t index,
                            const std::map<std::string, AudioBuffer>* stems) {
  config.check();
  const std::uint64_t seed = stream_seed(config.seed, index);
  Rng rng(seed);
  GeneratedPair pair;
  pair.index = index;
  pair.stems = stems ? *stems : make_stems(config.task, seed, config.length);

  std::vector<TypeId> active;
  for (TypeId t : Registry::instance().source_types(config.task)) {
    auto it = pair.stems.find(spec_of(t).name);
    if (it == pair.stems.end()) continue;
    if (it->second.length() != config.length)
      throw Error("stem '" + it->first + "' has " + std::to_string(it->second.length()) +
                  " samples, expected " + std::to_string(config.length));
    if (!it->second.is_silent()) active.push_back(t);
  }
  if (active.empty()) throw GenerationError("every source stem is silent");

  for (int draw = 1;; ++draw) {
    const Graph proto = sample_prototype(config, rng, active);
    const SourceMap sources = bind_sources(proto, pair.stems, config.length);
    try {
      pair.graph = randomize_params(proto, sources, rng, config.length, &pair.audio,
                                    config.reject_ghosts);
      return pair;
    } catch (const GenerationError&) {
      if (draw == kMaxPrototypeDraws) throw;
    }
  }
}

std::string manifest_line(const ManifestRow& row) {
  nlohmann::ordered_json j;
  j["id"] = row.id;
  j["seed"] = row.seed;
  j["graph"] = row.graph;
  j["audio"] = row.audio;
  j["sources"] = row.sources;
  j["task"] = task_name(row.task);
  return j.dump();
}

ManifestRow parse_manifest_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest row: ") + e.what());
  }
  ManifestRow row;
  try {
    row.id = j.at("id").get<std::uint64_t>();
    row.seed = j.at("seed").get<std::uint64_t>();
    row.graph = j.at("graph").get<std::string>();
    row.audio = j.at("audio").get<std::string>();
    row.sources = j.at("sources").get<std::vector<std::string>>();
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw ParseError("manifest row: unknown task");
    row.task = *task;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest row: ") + e.what());
  }
  return row;
}

}  // namespace graphfx
