#pragma once

#include <cstddef>
#include <memory>
#include <span>

#include "graphfx/audio_buffer.hpp"
#include "graphfx/registry.hpp"

namespace graphfx::dsp {

// One block of a whole-segment render. Unconnected inlets are null and read
// as zeros.
struct BlockIo {
  std::span<const AudioBuffer* const> in;
  std::span<AudioBuffer* const> out;
  std::size_t begin = 0;
  std::size_t frames = 0;

  bool connected(std::size_t inlet) const { return in[inlet] != nullptr; }
  double input(std::size_t inlet, std::size_t ch, std::size_t i) const {
    return in[inlet] ? in[inlet]->at(ch, begin + i) : 0.0;
  }
  double& output(std::size_t outlet, std::size_t ch, std::size_t i) const {
    return out[outlet]->at(ch, begin + i);
  }
};

// Stateful processor. State persists across blocks until reset().
class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual void reset() = 0;
  virtual void process(const BlockIo& io) = 0;
};

// Kernel for a processor type; `params` are normalized values aligned with
// the spec's descriptors. Sources and the sink have no kernel.
std::unique_ptr<Kernel> make_kernel(TypeId type, std::span<const double> params);

// Physical value of descriptor `index` with a control signal added in
// normalized units: clamp(v + 0.5 * control, 0, 1).
double modulated(TypeId type, std::size_t index, double normalized, double control);

}  // namespace graphfx::dsp
