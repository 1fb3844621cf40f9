#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphfx/audio_buffer.hpp"
#include "graphfx/graph.hpp"
#include "graphfx/renderer.hpp"
#include "graphfx/rng.hpp"

namespace graphfx {

enum class Motif {
  parametric_eq,         // 1-3 filters in series
  serial_dynamics,       // compressor -> noisegate/expander
  gated_reverb,          // reverb -> noisegate keyed by the dry signal
  modulation,            // lfo -> chorus/flanger/vibrato
  lfo_phaser,            // lfo -> phaser
  delay_send,            // dry + (delay -> filter) -> mix
  pitch_bank,            // dry + 2-3 x (pitchshift -> panning) -> mix
  multiband_distortion,  // crossover -> distortion per band -> mix
  ms_imaging,            // ms_split -> per-channel filters -> ms_merge -> imager
  lofi,                  // bitcrush -> distortion
};
inline constexpr int kNumMotifs = 10;
std::string_view motif_name(Motif m);
std::optional<Motif> parse_motif(std::string_view name);

struct GenConfig {
  Task task = Task::singing;
  // Motifs per singing chain.
  int min_motifs = 1;
  int max_motifs = 4;
  // Drum: motifs per track and on the mixing bus.
  int track_min_motifs = 1;
  int track_max_motifs = 2;
  int bus_min_motifs = 1;
  int bus_max_motifs = 3;
  // Chance that a chain slot becomes a crossover with a sub-chain per band.
  double multiband_prob = 0.15;
  // Chance that a motif gets a sidechain or modulation from an earlier tap.
  double aux_prob = 0.25;
  std::uint64_t seed = 0;
  // When set, every chain slot uses this motif (bus slots included).
  std::optional<Motif> forced_motif;
  std::size_t length = kDefaultSegmentLength;
  // Reject parameter draws that leave a ghost node (see ghost_nodes).
  bool reject_ghosts = true;

  // Throws Error describing the first bad field.
  void check() const;
};

// Types and edges only; params at defaults. Drum graphs get one track per
// entry of `active_sources` (all drum sources when empty). The result is
// valid and already LTI-reordered.
Graph sample_prototype(const GenConfig& config, Rng& rng,
                       std::span<const TypeId> active_sources = {});

struct EnergyBand {
  double lo = 0.0;  // Hz
  double hi = 0.0;  // Hz
};

// Frequencies where the cumulative power spectrum of the whole signal
// (summed over channels) first reaches `lo` and `hi` of its total, on the
// FFT bin grid. Throws Error on a silent signal.
EnergyBand cumulative_energy_band(const AudioBuffer& signal, double lo = 0.2, double hi = 0.8);

// Short-term level in dB: RMS over both channels of 1024-sample frames at
// hop 512, floored at -120 dB.
std::vector<double> energy_envelope_db(const AudioBuffer& signal, std::size_t frame = 1024,
                                       std::size_t hop = 512);
// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

inline constexpr int kMaxRandomizeRetries = 8;
// A processor whose drawn params leave its input spectrally unchanged
// (energy-matched MSS at or below kMinContribution) is redrawn up to
// kMaxContributionRedraws times, so it does not end up a ghost node.
inline constexpr double kMinContribution = 1e-2;
inline constexpr int kMaxPrototypeDraws = 32;
// Consecutive repairs of the same ghost before giving up on the prototype.
inline constexpr int kMaxGhostStreak = 3;
inline constexpr int kMaxContributionRedraws = 8;

// Copy of g with node `id` taken out. Signals feeding its `in` inlet are
// wired straight to the audio inlets it fed, with the two edge gains
// multiplied (clamped to kMaxEdgeGain; parallel duplicates merge by adding
// gains); control inlets it fed are left open. Control generators left
// without a consumer go too. Nullopt for sources and sinks and when the
// result is invalid, e.g. an LFO on a required modulation inlet.
std::optional<Graph> bypass_node(const Graph& g, int id);

// Bypassing a processor must move the output by more than this MSS.
inline constexpr double kGhostMss = 2e-3;

// Processors (every family but sources, sinks and utilities) whose bypass
// changes `rendered`, the graph's output, by at most `threshold` MSS.
// Nodes that cannot be bypassed are not reported.
std::vector<int> ghost_nodes(const Graph& g, const SourceMap& sources, std::size_t length,
                             const AudioBuffer& rendered, double threshold = kGhostMss);

// Draws edge gains and params, rendering the graph once per attempt so
// filter frequencies and dynamics thresholds follow the signal reaching
// each node. Retries when a filter or dynamics node hears silence or, with
// `reject_ghosts`, when some processor ends up a ghost; then throws
// GenerationError. `rendered` receives the final output.
Graph randomize_params(const Graph& proto, const SourceMap& sources, Rng& rng,
                       std::size_t length = kDefaultSegmentLength,
                       AudioBuffer* rendered = nullptr, bool reject_ghosts = true);

struct GeneratedPair {
  std::uint64_t index = 0;
  Graph graph;
  AudioBuffer audio;
  std::map<std::string, AudioBuffer> stems;  // keyed by source type name
};

// Pair `index` of the run `config.seed`; a pure function of both and of
// the stems. Procedural stems are drawn when `stems` is null. Drum graphs
// only get tracks whose stem is non-silent. A prototype whose params cannot
// be drawn is replaced, up to kMaxPrototypeDraws times.
GeneratedPair generate_pair(const GenConfig& config, std::uint64_t index,
                            const std::map<std::string, AudioBuffer>* stems = nullptr);

struct ManifestRow {
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
  std::string graph;
  std::string audio;
  std::vector<std::string> sources;
  Task task = Task::singing;
};

std::string manifest_line(const ManifestRow& row);
ManifestRow parse_manifest_line(std::string_view line);

}  // namespace graphfx
