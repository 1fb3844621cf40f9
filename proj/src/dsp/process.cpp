#include "graphfx/dsp/process.hpp"

#include <cmath>

#include "graphfx/errors.hpp"

namespace graphfx::dsp {

AudioBuffer normalize_energy(const AudioBuffer& reference_in, const AudioBuffer& raw_out) {
  AudioBuffer out = raw_out;
  AudioBuffer* outs[] = {&out};
  normalize_energy(reference_in.energy(), outs);
  return out;
}

void normalize_energy(double reference_energy, std::span<AudioBuffer* const> outlets) {
  double out_energy = 0.0;
  for (const AudioBuffer* b : outlets) out_energy += b->energy();
  if (reference_energy <= kEnergyEps || out_energy <= kEnergyEps) return;
  const double g = std::sqrt(reference_energy / out_energy);
  for (AudioBuffer* b : outlets) b->scale(g);
}

bool is_reference_inlet(const InletSpec& inlet) {
  return inlet.kind == PortKind::audio && inlet.name != "sidechain";
}

std::vector<AudioBuffer> run_processor(TypeId type, std::span<const double> params,
                                       std::span<const AudioBuffer* const> inlets,
                                       std::size_t length, bool normalize, int node_id,
                                       std::optional<double> reference_energy) {
  const auto& spec = spec_of(type);
  if (inlets.size() != spec.inlets.size())
    throw Error("processor '" + spec.name + "' expects " + std::to_string(spec.inlets.size()) +
                " inlets");
  for (std::size_t k = 0; k < inlets.size(); ++k) {
    if (!inlets[k]) continue;
    if (inlets[k]->length() != length)
      throw Error("inlet '" + spec.inlets[k].name + "' of '" + spec.name +
                  "' has mismatched length");
    if (!inlets[k]->is_finite())
      throw NumericError(node_id, "non-finite input at inlet '" + spec.inlets[k].name +
                                      "' of node " + std::to_string(node_id) + " (" +
                                      spec.name + ")");
  }

  auto kernel = make_kernel(type, params);
  std::vector<AudioBuffer> outs(spec.outlets.size(), AudioBuffer(length));
  std::vector<AudioBuffer*> out_ptrs;
  for (auto& b : outs) out_ptrs.push_back(&b);
  for (std::size_t begin = 0; begin < length; begin += kBlockLength) {
    BlockIo io{inlets, out_ptrs, begin, std::min(kBlockLength, length - begin)};
    kernel->process(io);
  }

  for (std::size_t k = 0; k < outs.size(); ++k) {
    if (!outs[k].is_finite())
      throw NumericError(node_id, "non-finite output at outlet '" + spec.outlets[k].name +
                                      "' of node " + std::to_string(node_id) + " (" +
                                      spec.name + ")");
  }

  if (normalize) {
    double reference = 0.0;
    if (reference_energy) {
      reference = *reference_energy;
    } else {
      for (std::size_t k = 0; k < inlets.size(); ++k)
        if (inlets[k] && is_reference_inlet(spec.inlets[k])) reference += inlets[k]->energy();
    }
    std::vector<AudioBuffer*> audio;
    for (std::size_t k = 0; k < outs.size(); ++k)
      if (spec.outlets[k].kind == PortKind::audio) audio.push_back(&outs[k]);
    normalize_energy(reference, audio);
  }
  return outs;
}

void ProcessorState::reset() {
  if (kernel_) kernel_->reset();
}

PortSignals process_impl(TypeId type, const PhysicalParams& params, const PortSignals& inputs,
                         ProcessorState& state, std::size_t length, bool normalize) {
  const auto& spec = spec_of(type);
  std::vector<double> norm;
  for (const auto& d : spec.params) norm.push_back(d.default_normalized());
  for (const auto& [name, value] : params) {
    const auto idx = spec.param_index(name);
    if (!idx) throw Error("processor '" + spec.name + "' has no param '" + name + "'");
    norm[*idx] = unmap_param(spec.params[*idx], value);
  }

  std::vector<const AudioBuffer*> in(spec.inlets.size(), nullptr);
  bool have_length = length != 0;
  for (const auto& [name, buf] : inputs) {
    const auto idx = spec.inlet_index(name);
    if (!idx) throw Error("processor '" + spec.name + "' has no inlet '" + name + "'");
    if (have_length && buf.length() != length)
      throw Error("inputs of '" + spec.name + "' differ in length");
    if (!buf.is_finite())
      throw NumericError(-1, "non-finite input at inlet '" + name + "' of '" + spec.name + "'");
    length = buf.length();
    have_length = true;
    in[*idx] = &buf;
  }
  for (std::size_t k = 0; k < spec.inlets.size(); ++k)
    if (!spec.inlets[k].optional && !in[k])
      throw Error("processor '" + spec.name + "' requires inlet '" + spec.inlets[k].name + "'");

  if (!state.kernel_ || state.type_ != type || state.params_ != norm) {
    state.kernel_ = make_kernel(type, norm);
    state.type_ = type;
    state.params_ = norm;
  }

  std::vector<AudioBuffer> outs(spec.outlets.size(), AudioBuffer(length));
  std::vector<AudioBuffer*> out_ptrs;
  for (auto& b : outs) out_ptrs.push_back(&b);
  for (std::size_t begin = 0; begin < length; begin += kBlockLength) {
    BlockIo io{in, out_ptrs, begin, std::min(kBlockLength, length - begin)};
    state.kernel_->process(io);
  }
  for (const auto& b : outs)
    if (!b.is_finite()) throw NumericError(-1, "processor '" + spec.name + "' produced a non-finite value");
  if (normalize) {
    double reference = 0.0;
    for (std::size_t k = 0; k < in.size(); ++k)
      if (in[k] && is_reference_inlet(spec.inlets[k])) reference += in[k]->energy();
    std::vector<AudioBuffer*> audio;
    for (std::size_t k = 0; k < outs.size(); ++k)
      if (spec.outlets[k].kind == PortKind::audio) audio.push_back(&outs[k]);
    normalize_energy(reference, audio);
  }

  PortSignals result;
  for (std::size_t k = 0; k < outs.size(); ++k) result.emplace(spec.outlets[k].name, std::move(outs[k]));
  return result;
}

PortSignals process(TypeId type, const PhysicalParams& params, const PortSignals& inputs,
                    ProcessorState& state, std::size_t length) {
  return process_impl(type, params, inputs, state, length, true);
}

PortSignals process_raw(TypeId type, const PhysicalParams& params, const PortSignals& inputs,
                        ProcessorState& state, std::size_t length) {
  return process_impl(type, params, inputs, state, length, false);
}

double map_param(const ParamDescriptor& d, double normalized) { return d.to_physical(normalized); }

double unmap_param(const ParamDescriptor& d, double physical) { return d.to_normalized(physical); }

}  // namespace graphfx::dsp
