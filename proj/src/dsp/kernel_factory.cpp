#include <algorithm>

#include "graphfx/errors.hpp"
#include "graphfx/registry.hpp"
#include "kernels.hpp"

namespace graphfx::dsp {

double physical(TypeId type, std::size_t index, std::span<const double> p) {
  return spec_of(type).params[index].to_physical(p[index]);
}

double modulated(TypeId type, std::size_t index, double normalized, double control) {
  const double v = std::clamp(normalized + 0.5 * control, 0.0, 1.0);
  return spec_of(type).params[index].to_physical(v);
}

std::unique_ptr<Kernel> make_kernel(TypeId type, std::span<const double> params) {
  const auto& spec = spec_of(type);
  if (params.size() != spec.params.size()) {
    throw Error("kernel for '" + spec.name + "' got " + std::to_string(params.size()) +
                " params, expected " + std::to_string(spec.params.size()));
  }
  switch (static_cast<Proc>(type)) {
    case Proc::lowpass:
    case Proc::bandpass:
    case Proc::highpass:
    case Proc::bandreject:
    case Proc::lowpass4:
    case Proc::bandpass4:
    case Proc::highpass4:
    case Proc::lowshelf:
    case Proc::highshelf:
    case Proc::bell:
      return make_filter_kernel(type, params);
    case Proc::crossover:
      return make_crossover_kernel(params);
    case Proc::phaser:
      return make_phaser_kernel(params);
    case Proc::chorus:
    case Proc::flanger:
    case Proc::vibrato:
      return make_mod_delay_kernel(type, params);
    case Proc::mono_delay:
    case Proc::pingpong_delay:
      return make_echo_kernel(type, params);
    case Proc::mono_reverb:
    case Proc::stereo_reverb:
      return make_reverb_kernel(type, params);
    case Proc::distortion:
      return make_distortion_kernel(params);
    case Proc::bitcrush:
      return make_bitcrush_kernel(params);
    case Proc::compressor:
    case Proc::noisegate:
    case Proc::expander:
      return make_dynamics_kernel(type, params);
    case Proc::pitchshift:
      return make_pitchshift_kernel(params);
    case Proc::mix:
    case Proc::panning:
    case Proc::imager:
    case Proc::ms_split:
    case Proc::ms_merge:
      return make_utility_kernel(type, params);
    case Proc::lfo:
    case Proc::stereo_lfo:
    case Proc::envelope_follower:
      return make_control_kernel(type, params);
    default:
      break;
  }
  throw Error("type '" + spec.name + "' has no processing kernel");
}

}  // namespace graphfx::dsp
