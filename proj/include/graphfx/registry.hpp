#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace graphfx {

using TypeId = int;

// Registry order is frozen: source nodes, the 33 processors top-to-bottom,
// then the sink. The numeric value is the token vocabulary index.
enum class Proc : TypeId {
  in, kick, snare, hat, tom, ride, crash,
  lowpass, bandpass, highpass, bandreject, lowpass4, bandpass4, highpass4,
  lowshelf, highshelf, bell, crossover, phaser,
  chorus, flanger, vibrato, mono_delay, pingpong_delay, mono_reverb, stereo_reverb,
  distortion, bitcrush, compressor, noisegate, expander, pitchshift,
  mix, panning, imager, ms_split, ms_merge,
  lfo, stereo_lfo, envelope_follower,
  out,
};

inline constexpr TypeId kNumTypes = static_cast<TypeId>(Proc::out) + 1;
inline constexpr TypeId kNumProcessors = 33;

constexpr TypeId id_of(Proc p) noexcept { return static_cast<TypeId>(p); }

enum class Task { singing, drum };

enum class PortKind { audio, control };
enum class Scale { linear, log };

enum class Family {
  source,
  low_order_filter,
  high_order_filter,
  nonlinear,
  utility,
  control,
  sink,
};

struct InletSpec {
  std::string name;
  PortKind kind;
  bool optional;
};

struct OutletSpec {
  std::string name;
  PortKind kind;
};

struct ParamDescriptor {
  std::string name;
  double phys_min;
  double phys_max;
  Scale scale;
  double default_value;  // physical units

  // Throws Error when v is outside [0, 1].
  double to_physical(double v) const;
  // Inverse of to_physical; clamps to the descriptor range first.
  double to_normalized(double physical) const;
  double default_normalized() const { return to_normalized(default_value); }
};

struct ProcessorSpec {
  TypeId type_id;
  std::string name;
  Family family;
  std::vector<InletSpec> inlets;
  std::vector<OutletSpec> outlets;
  std::vector<ParamDescriptor> params;

  std::optional<int> inlet_index(std::string_view n) const;
  std::optional<int> outlet_index(std::string_view n) const;
  std::optional<int> param_index(std::string_view n) const;
};

// (outlet name, inlet name) pair; the edge type t_ij.
struct EdgeType {
  std::string outlet;
  std::string inlet;
  friend bool operator==(const EdgeType&, const EdgeType&) = default;
};

class Registry {
 public:
  static const Registry& instance();

  std::span<const ProcessorSpec> specs() const { return specs_; }
  const ProcessorSpec& spec(TypeId t) const;
  const ProcessorSpec& spec(Proc p) const { return spec(id_of(p)); }
  std::optional<TypeId> find(std::string_view name) const;

  // Every kind-compatible (outlet, inlet) name pair across the registry.
  std::span<const EdgeType> edge_types() const { return edge_types_; }
  std::optional<int> edge_type_index(std::string_view outlet,
                                     std::string_view inlet) const;

  std::span<const TypeId> source_types(Task task) const;
  bool is_source(TypeId t) const;
  bool is_sink(TypeId t) const { return t == id_of(Proc::out); }

 private:
  Registry();
  std::vector<ProcessorSpec> specs_;
  std::vector<EdgeType> edge_types_;
  std::vector<TypeId> singing_sources_;
  std::vector<TypeId> drum_sources_;
};

const ProcessorSpec& spec_of(TypeId t);
std::string_view task_name(Task t);
std::optional<Task> parse_task(std::string_view s);

// Time-invariant linear single-input single-output filters. Whether a node
// of one of these types is LTI also depends on its modulation inlets.
bool is_lti_filter_type(TypeId t);
// Filters whose frequency is drawn from the input's energy band.
bool is_low_order_linear_filter(TypeId t);
bool is_dynamics_type(TypeId t);

}  // namespace graphfx
