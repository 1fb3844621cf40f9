#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "kernels.hpp"

namespace graphfx::dsp {

namespace {

// Sine oscillator indexed by sample count since reset.
class LfoKernel final : public Kernel {
 public:
  LfoKernel(TypeId type, std::span<const double> p)
      : omega_(2.0 * std::numbers::pi * physical(type, 0, p) / kSampleRate),
        phase_(physical(type, 1, p)),
        offset_(type == id_of(Proc::stereo_lfo) ? physical(type, 2, p) : 0.0) {}

  void reset() override { n_ = 0; }

  void process(const BlockIo& io) override {
    for (std::size_t i = 0; i < io.frames; ++i, ++n_) {
      const double arg = omega_ * static_cast<double>(n_) + phase_;
      io.output(0, 0, i) = std::sin(arg);
      io.output(0, 1, i) = std::sin(arg + offset_);
    }
  }

 private:
  double omega_;
  double phase_;
  double offset_;
  std::uint64_t n_ = 0;
};

class EnvelopeFollowerKernel final : public Kernel {
 public:
  explicit EnvelopeFollowerKernel(std::span<const double> p)
      : attack_(one_pole_coeff(physical(id_of(Proc::envelope_follower), 0, p))),
        release_(one_pole_coeff(physical(id_of(Proc::envelope_follower), 1, p))),
        gain_(db_to_amp(physical(id_of(Proc::envelope_follower), 2, p))) {}

  void reset() override { env_ = {0.0, 0.0}; }

  void process(const BlockIo& io) override {
    for (std::size_t c = 0; c < kChannels; ++c) {
      double env = env_[c];
      for (std::size_t i = 0; i < io.frames; ++i) {
        const double x = std::abs(io.input(0, c, i));
        const double a = x > env ? attack_ : release_;
        env = a * env + (1.0 - a) * x;
        io.output(0, c, i) = 2.0 * std::min(env * gain_, 1.0) - 1.0;
      }
      env_[c] = env;
    }
  }

 private:
  double attack_;
  double release_;
  double gain_;
  std::array<double, kChannels> env_{};
};

}  // namespace

std::unique_ptr<Kernel> make_control_kernel(TypeId type, std::span<const double> p) {
  if (type == id_of(Proc::envelope_follower))
    return std::make_unique<EnvelopeFollowerKernel>(p);
  return std::make_unique<LfoKernel>(type, p);
}

}  // namespace graphfx::dsp
