#pragma once

#include <map>
#include <optional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "graphfx/audio_buffer.hpp"
#include "graphfx/dsp/kernel.hpp"
#include "graphfx/registry.hpp"

namespace graphfx::dsp {

inline constexpr double kEnergyEps = 1e-12;

using PortSignals = std::map<std::string, AudioBuffer>;
using PhysicalParams = std::map<std::string, double>;

// raw_out * sqrt(E_in / E_out); returned unscaled when either energy <= eps.
AudioBuffer normalize_energy(const AudioBuffer& reference_in, const AudioBuffer& raw_out);
// Joint form: one scalar for all outlets, from the reference energy.
void normalize_energy(double reference_energy, std::span<AudioBuffer* const> outlets);

// Inlets whose energy is preserved by normalization (audio, not sidechain).
bool is_reference_inlet(const InletSpec& inlet);

// Runs a fresh kernel over whole buffers in kBlockLength blocks. `inlets`
// is aligned with the spec's inlets (null = unconnected). Audio outlets are
// energy-normalized when `normalize` is set, to `reference_energy` when it
// is given and otherwise to the reference inlets' energy. Throws
// NumericError tagged with node_id on non-finite input or output.
std::vector<AudioBuffer> run_processor(TypeId type, std::span<const double> params,
                                       std::span<const AudioBuffer* const> inlets,
                                       std::size_t length, bool normalize = true,
                                       int node_id = -1,
                                       std::optional<double> reference_energy = std::nullopt);

// Opaque per-processor state; configured on first use.
class ProcessorState {
 public:
  ProcessorState() = default;
  void reset();
  bool configured() const { return kernel_ != nullptr; }

 private:
  friend PortSignals process_impl(TypeId, const PhysicalParams&, const PortSignals&,
                                  ProcessorState&, std::size_t, bool);
  TypeId type_ = -1;
  std::vector<double> params_;
  std::unique_ptr<Kernel> kernel_;
};

// Processes one segment with persistent state. Missing params take defaults;
// every input buffer must share one length. `length` sizes the segment of
// processors without inputs (LFOs); when inputs exist it must be 0 or match.
PortSignals process(TypeId type, const PhysicalParams& params, const PortSignals& inputs,
                    ProcessorState& state, std::size_t length = 0);
// As process(), without energy normalization.
PortSignals process_raw(TypeId type, const PhysicalParams& params, const PortSignals& inputs,
                        ProcessorState& state, std::size_t length = 0);

// map_param and its inverse.
double map_param(const ParamDescriptor& d, double normalized);
double unmap_param(const ParamDescriptor& d, double physical);

}  // namespace graphfx::dsp
