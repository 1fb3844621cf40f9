#include "graphfx/stems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "graphfx/errors.hpp"
#include "graphfx/rng.hpp"

namespace graphfx {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFs = kSampleRate;

struct Vowel {
  std::array<double, 3> formants;
  std::array<double, 3> widths;
};

constexpr std::array<Vowel, 5> kVowels = {{
    {{800, 1150, 2900}, {80, 90, 120}},   // a
    {{400, 1600, 2700}, {60, 80, 120}},   // e
    {{350, 1700, 2700}, {50, 100, 120}},  // i
    {{450, 800, 2830}, {70, 80, 100}},    // o
    {{325, 700, 2530}, {50, 60, 170}},    // u
}};

double formant_gain(const Vowel& v, double f) {
  double g = 0.02;
  const double peak[] = {1.0, 0.5, 0.25};
  for (int k = 0; k < 3; ++k) {
    const double d = (f - v.formants[k]) / v.widths[k];
    g += peak[k] / (1.0 + d * d);
  }
  return g;
}

void make_stereo(AudioBuffer& out, const std::vector<double>& mono, Rng& rng) {
  const double pan = rng.uniform(-0.3, 0.3);
  const double gl = std::cos((pan + 1.0) * kPi / 4.0) * std::sqrt(2.0);
  const double gr = std::sin((pan + 1.0) * kPi / 4.0) * std::sqrt(2.0);
  for (std::size_t n = 0; n < mono.size(); ++n) {
    out.at(0, n) = gl * mono[n];
    out.at(1, n) = gr * mono[n];
  }
}

void normalize_peak(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (double& v : x) v *= peak / m;
}

// Notes with vibrato, additive harmonics shaped by vowel formants, a little
// breath noise, and short rests between phrases.
std::vector<double> voice(std::size_t length, Rng& rng) {
  std::vector<double> out(length, 0.0);
  const double root = rng.uniform(110.0, 260.0);
  const int scale[] = {0, 2, 4, 5, 7, 9, 11, 12};
  std::size_t pos = static_cast<std::size_t>(rng.uniform(0.0, 0.15) * kFs);
  double phase_h = 0.0;
  while (pos < length) {
    const auto dur = static_cast<std::size_t>(rng.uniform(0.25, 0.8) * kFs);
    const double f0 = root * std::exp2(scale[rng.integer(0, 7)] / 12.0);
    const Vowel& vowel = kVowels[static_cast<std::size_t>(rng.integer(0, 4))];
    const double vib_rate = rng.uniform(4.5, 6.5);
    const double vib_depth = rng.uniform(0.1, 0.5);
    const double loud = rng.uniform(0.5, 1.0);
    const int harmonics = std::min(40, static_cast<int>(10000.0 / f0));
    std::vector<double> amps(static_cast<std::size_t>(harmonics) + 1, 0.0);
    for (int k = 1; k <= harmonics; ++k) amps[k] = formant_gain(vowel, k * f0) / k;
    const std::size_t end = std::min(length, pos + dur);
    const double attack = 0.03 * kFs;
    const double release = 0.06 * kFs;
    for (std::size_t n = pos; n < end; ++n) {
      const double t = static_cast<double>(n - pos);
      const double f = f0 * std::exp2(vib_depth / 12.0 * std::sin(2 * kPi * vib_rate * t / kFs));
      phase_h += 2 * kPi * f / kFs;
      if (phase_h > 2 * kPi) phase_h -= 2 * kPi;
      double s = 0.0;
      for (int k = 1; k <= harmonics; ++k) s += amps[k] * std::sin(k * phase_h);
      s += 0.01 * rng.normal();
      const double env = std::min({1.0, t / attack, static_cast<double>(end - n) / release});
      out[n] = loud * env * s;
    }
    pos = end + static_cast<std::size_t>(rng.uniform(0.02, 0.25) * kFs);
  }
  normalize_peak(out, 0.5);
  return out;
}

using HitFn = void (*)(std::vector<double>&, std::size_t, Rng&, double);

void kick_hit(std::vector<double>& out, std::size_t at, Rng& rng, double vel) {
  const double f_hi = rng.uniform(120.0, 180.0);
  const double f_lo = rng.uniform(40.0, 60.0);
  const double decay = rng.uniform(0.2, 0.45);
  double phase = 0.0;
  for (std::size_t n = at; n < out.size(); ++n) {
    const double t = (n - at) / kFs;
    if (t > 5 * decay) break;
    const double f = f_lo + (f_hi - f_lo) * std::exp(-t / 0.04);
    phase += 2 * kPi * f / kFs;
    out[n] += vel * std::exp(-t / decay) * std::sin(phase);
  }
}

void snare_hit(std::vector<double>& out, std::size_t at, Rng& rng, double vel) {
  const double tone = rng.uniform(160.0, 240.0);
  const double decay = rng.uniform(0.08, 0.2);
  double lp = 0.0;
  for (std::size_t n = at; n < out.size(); ++n) {
    const double t = (n - at) / kFs;
    if (t > 5 * decay) break;
    const double noise = rng.normal();
    lp += 0.5 * (noise - lp);
    const double body = 0.6 * std::sin(2 * kPi * tone * t) * std::exp(-t / 0.05);
    out[n] += vel * std::exp(-t / decay) * (0.5 * lp + body);
  }
}

void hat_hit(std::vector<double>& out, std::size_t at, Rng& rng, double vel) {
  const double decay = rng.uniform(0.02, 0.08);
  double prev = 0.0;
  for (std::size_t n = at; n < out.size(); ++n) {
    const double t = (n - at) / kFs;
    if (t > 5 * decay) break;
    const double noise = rng.normal();
    out[n] += vel * std::exp(-t / decay) * 0.5 * (noise - prev);
    prev = noise;
  }
}

void tom_hit(std::vector<double>& out, std::size_t at, Rng& rng, double vel) {
  const double f0 = rng.uniform(80.0, 220.0);
  const double decay = rng.uniform(0.25, 0.5);
  double phase = 0.0;
  for (std::size_t n = at; n < out.size(); ++n) {
    const double t = (n - at) / kFs;
    if (t > 5 * decay) break;
    const double f = f0 * (1.0 + 0.5 * std::exp(-t / 0.03));
    phase += 2 * kPi * f / kFs;
    out[n] += vel * std::exp(-t / decay) * std::sin(phase);
  }
}

void ride_hit(std::vector<double>& out, std::size_t at, Rng& rng, double vel) {
  std::array<double, 6> partials{};
  for (auto& p : partials) p = rng.uniform(2500.0, 9000.0);
  const double decay = rng.uniform(0.6, 1.2);
  for (std::size_t n = at; n < out.size(); ++n) {
    const double t = (n - at) / kFs;
    if (t > 4 * decay) break;
    double s = 0.0;
    for (double p : partials) s += std::sin(2 * kPi * p * t);
    out[n] += vel * std::exp(-t / decay) * (s / 6.0 + 0.05 * rng.normal());
  }
}

void crash_hit(std::vector<double>& out, std::size_t at, Rng& rng, double vel) {
  const double decay = rng.uniform(1.0, 2.0);
  double prev = 0.0;
  for (std::size_t n = at; n < out.size(); ++n) {
    const double t = (n - at) / kFs;
    if (t > 4 * decay) break;
    const double noise = rng.normal();
    out[n] += vel * std::exp(-t / decay) * 0.6 * (noise - 0.7 * prev);
    prev = noise;
  }
}

// Hits on a sixteenth-note grid at a random tempo. `weights` gives the hit
// probability per step position within a bar of 16.
std::vector<double> pattern(std::size_t length, Rng& rng, HitFn hit,
                            const std::array<double, 16>& weights) {
  std::vector<double> out(length, 0.0);
  const double bpm = rng.uniform(90.0, 140.0);
  const double step = 60.0 / bpm / 4.0 * kFs;
  bool any = false;
  for (int s = 0;; ++s) {
    const auto at = static_cast<std::size_t>(s * step);
    if (at >= length) break;
    if (rng.bernoulli(weights[static_cast<std::size_t>(s % 16)])) {
      hit(out, at, rng, rng.uniform(0.6, 1.0));
      any = true;
    }
  }
  if (!any) hit(out, 0, rng, 1.0);
  normalize_peak(out, 0.5);
  return out;
}

}  // namespace

AudioBuffer make_stem(std::string_view name, std::uint64_t seed, std::size_t length) {
  const auto type = Registry::instance().find(name);
  if (!type || !Registry::instance().is_source(*type))
    throw Error("no procedural stem named '" + std::string(name) + "'");
  Rng rng(splitmix64(seed ^ (static_cast<std::uint64_t>(*type) << 56)));
  std::vector<double> mono;
  switch (static_cast<Proc>(*type)) {
    case Proc::in:
      mono = voice(length, rng);
      break;
    case Proc::kick:
      mono = pattern(length, rng, kick_hit,
                     {1, 0, 0, 0, 0.2, 0, 0.3, 0, 0.9, 0, 0.2, 0, 0.2, 0, 0.3, 0});
      break;
    case Proc::snare:
      mono = pattern(length, rng, snare_hit,
                     {0, 0, 0, 0, 1, 0, 0, 0.1, 0, 0, 0, 0, 1, 0, 0.1, 0.2});
      break;
    case Proc::hat:
      mono = pattern(length, rng, hat_hit,
                     {0.9, 0.3, 0.9, 0.3, 0.9, 0.3, 0.9, 0.3, 0.9, 0.3, 0.9, 0.3, 0.9, 0.3, 0.9, 0.3});
      break;
    case Proc::tom:
      mono = pattern(length, rng, tom_hit,
                     {0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.3, 0, 0.4, 0.3, 0.5, 0.4});
      break;
    case Proc::ride:
      mono = pattern(length, rng, ride_hit,
                     {0.9, 0, 0.6, 0, 0.9, 0, 0.6, 0, 0.9, 0, 0.6, 0, 0.9, 0, 0.6, 0});
      break;
    default:
      mono = pattern(length, rng, crash_hit,
                     {0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
      break;
  }
  AudioBuffer out(length);
  make_stereo(out, mono, rng);
  return out;
}

std::map<std::string, AudioBuffer> make_stems(Task task, std::uint64_t seed, std::size_t length,
                                              bool drop_tracks) {
  std::map<std::string, AudioBuffer> out;
  const auto& reg = Registry::instance();
  for (TypeId t : reg.source_types(task)) {
    const auto& name = spec_of(t).name;
    out.emplace(name, make_stem(name, seed, length));
  }
  if (task == Task::drum && drop_tracks) {
    Rng rng(splitmix64(seed ^ 0x5eedULL));
    const char* optional[] = {"tom", "ride", "crash"};
    const int drops = rng.integer(0, 2);
    for (int k = 0; k < drops; ++k) {
      const char* name = optional[rng.integer(0, 2)];
      out.at(name) = AudioBuffer(length);
    }
  }
  return out;
}

}  // namespace graphfx
