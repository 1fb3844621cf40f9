#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "graphfx/validate.hpp"

namespace oracle {

using namespace graphfx;

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string fixture_path(const std::string& name) {
  return std::string(GRAPHFX_FIXTURE_DIR) + "/" + name;
}

std::vector<std::complex<double>> fft_radix2(std::vector<std::complex<double>> x) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) throw std::invalid_argument("fft_radix2: size not a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        // twiddles from the angle directly, no recurrence drift
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const auto u = x[i + k];
        const auto v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
      }
    }
  }
  return x;
}

std::vector<double> dft_magnitudes(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      // reduce k*t mod n first so the angle stays small and exact
      const double a = -2.0 * kPi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      re += frame[t] * std::cos(a);
      im += frame[t] * std::sin(a);
    }
    out[k] = std::hypot(re, im);
  }
  return out;
}

double mss_naive(const AudioBuffer& a, const AudioBuffer& b) {
  const std::size_t scales[] = {2048, 1024, 512, 256, 128, 64};
  const double eps = 1e-7;
  double total = 0.0;
  for (std::size_t n : scales) {
    const std::size_t hop = n / 4;
    std::vector<double> win(n);
    for (std::size_t i = 0; i < n; ++i)
      win[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    const std::size_t len = a.length();
    const std::size_t frames = len < n ? 1 : 1 + (len - n) / hop;
    for (std::size_t c = 0; c < 2; ++c) {
      double acc = 0.0;
      std::size_t count = 0;
      for (std::size_t f = 0; f < frames; ++f) {
        std::vector<double> fa(n, 0.0), fb(n, 0.0);
        for (std::size_t i = 0; i < n && f * hop + i < len; ++i) {
          fa[i] = a.at(c, f * hop + i) * win[i];
          fb[i] = b.at(c, f * hop + i) * win[i];
        }
        const auto ma = dft_magnitudes(fa);
        const auto mb = dft_magnitudes(fb);
        for (std::size_t k = 0; k < ma.size(); ++k) {
          acc += std::abs(ma[k] - mb[k]) + std::abs(std::log(ma[k] + eps) - std::log(mb[k] + eps));
          ++count;
        }
      }
      total += acc / static_cast<double>(count);
    }
  }
  return total / (6.0 * 2.0);
}

std::pair<double, double> energy_band(const AudioBuffer& x, double lo, double hi) {
  const std::size_t n = x.length();
  std::vector<double> power(n / 2 + 1, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<std::complex<double>> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = x.at(c, i);
    const auto s = fft_radix2(std::move(v));
    for (std::size_t k = 0; k <= n / 2; ++k) power[k] += std::norm(s[k]);
  }
  std::vector<double> cum(power.size());
  std::partial_sum(power.begin(), power.end(), cum.begin());
  const double total = cum.back();
  auto first_at = [&](double frac) {
    const auto it = std::find_if(cum.begin(), cum.end(), [&](double v) { return v / total >= frac; });
    const auto k = static_cast<double>(it == cum.end() ? cum.size() - 1 : it - cum.begin());
    return k * 44100.0 / static_cast<double>(n);
  };
  return {first_at(lo), first_at(hi)};
}

namespace {

struct Shape {
  std::vector<int> ids;
  std::map<int, std::size_t> index;
  std::vector<TypeId> types;
  // labelled edge multiplicity between node positions
  std::map<std::tuple<std::size_t, std::size_t, std::string, std::string>, int> edges;
  std::vector<std::vector<std::size_t>> neighbours;
  std::vector<std::multiset<std::tuple<int, std::string, std::string, TypeId>>> signature;
};

Shape shape_of(const Graph& g) {
  Shape s;
  for (const auto& n : g.nodes) {
    s.index[n.id] = s.ids.size();
    s.ids.push_back(n.id);
    s.types.push_back(n.type);
  }
  s.neighbours.resize(s.ids.size());
  s.signature.resize(s.ids.size());
  for (const auto& e : g.edges) {
    const auto a = s.index.at(e.src);
    const auto b = s.index.at(e.dst);
    ++s.edges[{a, b, e.outlet, e.inlet}];
    s.neighbours[a].push_back(b);
    s.neighbours[b].push_back(a);
    s.signature[a].insert({0, e.outlet, e.inlet, s.types[b]});
    s.signature[b].insert({1, e.outlet, e.inlet, s.types[a]});
  }
  return s;
}

int count(const Shape& s, std::size_t a, std::size_t b, const std::string& o, const std::string& i) {
  auto it = s.edges.find({a, b, o, i});
  return it == s.edges.end() ? 0 : it->second;
}

}  // namespace

bool isomorphic(const Graph& ga, const Graph& gb) {
  if (ga.task != gb.task || ga.nodes.size() != gb.nodes.size() || ga.edges.size() != gb.edges.size())
    return false;
  const Shape a = shape_of(ga);
  const Shape b = shape_of(gb);
  const std::size_t n = a.ids.size();

  // Visit a's nodes so each one (after the first of its component) has an
  // already-placed neighbour, which prunes the search early.
  std::vector<std::size_t> order;
  std::vector<bool> seen(n, false);
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    order.push_back(root);
    for (std::size_t q = order.size() - 1; q < order.size(); ++q) {
      for (std::size_t nb : a.neighbours[order[q]]) {
        if (!seen[nb]) {
          seen[nb] = true;
          order.push_back(nb);
        }
      }
    }
  }

  std::vector<std::size_t> map(n, n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> place = [&](std::size_t depth) -> bool {
    if (depth == n) {
      // Every edge of a has its image in b; equal edge counts then make it a bijection.
      for (const auto& [key, mult] : a.edges) {
        const auto& [x, y, o, i] = key;
        if (count(b, map[x], map[y], o, i) != mult) return false;
      }
      return true;
    }
    const std::size_t u = order[depth];
    for (std::size_t v = 0; v < n; ++v) {
      if (used[v] || a.types[u] != b.types[v] || a.signature[u] != b.signature[v]) continue;
      bool ok = true;
      for (std::size_t d = 0; d < depth && ok; ++d) {
        const std::size_t w = order[d];
        for (const auto& [key, mult] : a.edges) {
          const auto& [x, y, o, i] = key;
          if ((x == u && y == w) || (x == w && y == u) || (x == u && y == u)) {
            const std::size_t mx = x == u ? v : map[x];
            const std::size_t my = y == u ? v : map[y];
            if (count(b, mx, my, o, i) != mult) {
              ok = false;
              break;
            }
          }
        }
      }
      if (!ok) continue;
      map[u] = v;
      used[v] = true;
      if (place(depth + 1)) return true;
      used[v] = false;
      map[u] = n;
    }
    return false;
  };
  return place(0);
}

Graph random_lti_graph(Rng& rng) {
  static const Proc lti[] = {Proc::lowpass,  Proc::bandpass,  Proc::highpass,  Proc::bandreject,
                             Proc::lowpass4, Proc::bandpass4, Proc::highpass4, Proc::lowshelf,
                             Proc::highshelf, Proc::bell};
  static const Proc breakers[] = {Proc::distortion, Proc::compressor, Proc::bitcrush};
  auto pick_lti = [&] { return lti[rng.integer(0, 9)]; };

  Graph g;
  g.task = Task::singing;
  int tail = g.add_node(Proc::in);
  auto append = [&](Proc p) {
    const int id = g.add_node(p);
    g.connect(tail, "out", id, "in", rng.uniform(0.25, 1.0));
    tail = id;
  };

  const int stages = rng.integer(2, 5);
  for (int s = 0; s < stages; ++s) {
    const int kind = rng.integer(0, 5);
    if (kind <= 2) {
      // serial LTI run
      const int len = rng.integer(2, 4);
      for (int k = 0; k < len; ++k) append(pick_lti());
    } else if (kind == 3) {
      append(breakers[rng.integer(0, 2)]);
    } else if (kind == 4) {
      // dry/wet split around one LTI filter
      const int split = tail;
      const int f = g.add_node(pick_lti());
      const int m = g.add_node(Proc::mix);
      g.connect(split, "out", f, "in", rng.uniform(0.25, 1.0));
      g.connect(f, "out", m, "in", rng.uniform(0.25, 1.0));
      g.connect(split, "out", m, "in", rng.uniform(0.25, 1.0));
      tail = m;
    } else {
      // crossover with an LTI filter per band
      const int x = g.add_node(Proc::crossover);
      g.connect(tail, "out", x, "in", rng.uniform(0.25, 1.0));
      const int m = g.add_node(Proc::mix);
      for (const char* band : {"low", "high"}) {
        const int f = g.add_node(pick_lti());
        g.connect(x, band, f, "in", rng.uniform(0.25, 1.0));
        g.connect(f, "out", m, "in", rng.uniform(0.25, 1.0));
      }
      tail = m;
    }
  }
  const int out = g.add_node(Proc::out);
  g.connect(tail, "out", out, "in", 1.0);

  for (auto& n : g.nodes)
    for (double& p : n.params) p = rng.uniform();
  // Keep filters away from the range ends where a band can be nearly empty.
  for (auto& n : g.nodes) {
    if (auto idx = n.spec().param_index("frequency")) n.params[*idx] = rng.uniform(0.2, 0.8);
    if (auto idx = n.spec().param_index("q")) n.params[*idx] = rng.uniform(0.0, 0.6);
  }
  return g;
}

Graph relabel(const Graph& g, const std::vector<int>& perm, Rng& rng) {
  Graph out = g;
  for (auto& n : out.nodes) n.id = perm.at(static_cast<std::size_t>(n.id));
  for (auto& e : out.edges) {
    e.src = perm.at(static_cast<std::size_t>(e.src));
    e.dst = perm.at(static_cast<std::size_t>(e.dst));
  }
  for (std::size_t i = out.nodes.size(); i > 1; --i)
    std::swap(out.nodes[i - 1], out.nodes[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i) - 1))]);
  for (std::size_t i = out.edges.size(); i > 1; --i)
    std::swap(out.edges[i - 1], out.edges[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i) - 1))]);
  return out;
}

std::optional<Graph> delete_node(const Graph& g, int id) {
  const Node& victim = g.node(id);
  const Family fam = victim.spec().family;
  if (fam == Family::source || fam == Family::sink) return std::nullopt;

  // (src, outlet, dst, inlet) -> gain
  std::map<std::tuple<int, std::string, int, std::string>, double> routes;
  std::vector<std::tuple<int, std::string, int, std::string>> order;
  auto add = [&](int src, const std::string& outlet, int dst, const std::string& inlet, double gain) {
    const auto key = std::make_tuple(src, outlet, dst, inlet);
    auto it = routes.find(key);
    if (it == routes.end()) {
      routes[key] = std::min(gain, 2.0);
      order.push_back(key);
    } else {
      it->second = std::min(it->second + gain, 2.0);
    }
  };
  for (const auto& e : g.edges)
    if (e.src != id && e.dst != id) add(e.src, e.outlet, e.dst, e.inlet, e.gain);
  for (const auto& out : g.edges) {
    if (out.src != id) continue;
    const Node& consumer = g.node(out.dst);
    bool audio = false;
    for (const auto& port : consumer.spec().inlets)
      if (port.name == out.inlet) audio = port.kind == PortKind::audio;
    if (!audio) continue;
    for (const auto& in : g.edges)
      if (in.dst == id && in.inlet == "in") add(in.src, in.outlet, out.dst, out.inlet, in.gain * out.gain);
  }

  std::set<int> alive;
  for (const auto& n : g.nodes)
    if (n.id != id) alive.insert(n.id);
  // Repeatedly drop control nodes with nothing downstream.
  for (bool changed = true; changed;) {
    changed = false;
    for (int n : std::set<int>(alive)) {
      if (g.node(n).spec().family != Family::control) continue;
      bool used = false;
      for (const auto& key : order)
        used |= std::get<0>(key) == n && alive.count(std::get<2>(key)) > 0;
      if (!used) {
        alive.erase(n);
        changed = true;
      }
    }
  }

  Graph h;
  h.task = g.task;
  for (const auto& n : g.nodes)
    if (alive.count(n.id)) h.nodes.push_back(n);
  for (const auto& key : order) {
    const auto& [src, outlet, dst, inlet] = key;
    if (alive.count(src) && alive.count(dst)) h.edges.push_back({src, outlet, dst, inlet, routes[key]});
  }
  if (!validate(h).valid()) return std::nullopt;
  return h;
}

AudioBuffer sine(double freq_hz, double amplitude, std::size_t length, double phase) {
  AudioBuffer b(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double v = amplitude * std::sin(2.0 * kPi * freq_hz * static_cast<double>(i) / 44100.0 + phase);
    b.at(0, i) = b.at(1, i) = v;
  }
  return b;
}

AudioBuffer white_noise(Rng& rng, std::size_t length, double amplitude) {
  AudioBuffer b(length);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < length; ++i) b.at(c, i) = amplitude * (2.0 * rng.uniform() - 1.0);
  return b;
}

double rms_db(const AudioBuffer& x, std::size_t begin, std::size_t end) {
  double acc = 0.0;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = begin; i < end; ++i) acc += x.at(c, i) * x.at(c, i);
  return 10.0 * std::log10(acc / static_cast<double>(2 * (end - begin)));
}

}  // namespace oracle
