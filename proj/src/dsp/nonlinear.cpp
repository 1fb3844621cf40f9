#include <algorithm>
#include <array>
#include <cmath>

#include "kernels.hpp"

namespace graphfx::dsp {

namespace {

// y = f(g*x + a) - f(a), f = (1-h)*tanh + h*clip.
class DistortionKernel final : public Kernel {
 public:
  explicit DistortionKernel(std::span<const double> p)
      : gain_(db_to_amp(physical(id_of(Proc::distortion), 0, p))),
        hardness_(physical(id_of(Proc::distortion), 1, p)),
        bias_(0.5 * physical(id_of(Proc::distortion), 2, p)),
        offset_(shape(bias_)) {}

  void reset() override {}

  void process(const BlockIo& io) override {
    for (std::size_t c = 0; c < kChannels; ++c)
      for (std::size_t i = 0; i < io.frames; ++i)
        io.output(0, c, i) = shape(gain_ * io.input(0, c, i) + bias_) - offset_;
  }

 private:
  double shape(double u) const {
    return (1.0 - hardness_) * std::tanh(u) + hardness_ * std::clamp(u, -1.0, 1.0);
  }

  double gain_;
  double hardness_;
  double bias_;
  double offset_;
};

class BitcrushKernel final : public Kernel {
 public:
  explicit BitcrushKernel(std::span<const double> p)
      : levels_(std::exp2(physical(id_of(Proc::bitcrush), 0, p) - 1.0)) {}

  void reset() override {}

  void process(const BlockIo& io) override {
    for (std::size_t c = 0; c < kChannels; ++c)
      for (std::size_t i = 0; i < io.frames; ++i)
        io.output(0, c, i) = std::round(io.input(0, c, i) * levels_) / levels_;
  }

 private:
  double levels_;
};

// Two read taps sweep a 50 ms window at rate (1 - ratio) and are
// crossfaded with triangular weights half a window apart.
class PitchshiftKernel final : public Kernel {
 public:
  static constexpr std::size_t kWindow = 2205;

  explicit PitchshiftKernel(std::span<const double> p)
      : step_((1.0 - std::exp2(physical(id_of(Proc::pitchshift), 0, p) / 12.0)) /
              static_cast<double>(kWindow)),
        lines_{DelayLine(kWindow + 2), DelayLine(kWindow + 2)} {}

  void reset() override {
    for (auto& l : lines_) l.reset();
    phase_ = 0.0;
  }

  void process(const BlockIo& io) override {
    constexpr double w = static_cast<double>(kWindow);
    for (std::size_t i = 0; i < io.frames; ++i) {
      const double p0 = phase_;
      const double p1 = wrap(phase_ + 0.5);
      const double g0 = 1.0 - std::abs(2.0 * p0 - 1.0);
      const double g1 = 1.0 - std::abs(2.0 * p1 - 1.0);
      for (std::size_t c = 0; c < kChannels; ++c) {
        lines_[c].push(io.input(0, c, i));
        io.output(0, c, i) = g0 * lines_[c].read(p0 * w) + g1 * lines_[c].read(p1 * w);
      }
      phase_ = wrap(phase_ + step_);
    }
  }

 private:
  static double wrap(double x) { return x - std::floor(x); }

  double step_;
  double phase_ = 0.0;
  std::array<DelayLine, kChannels> lines_;
};

}  // namespace

std::unique_ptr<Kernel> make_distortion_kernel(std::span<const double> p) {
  return std::make_unique<DistortionKernel>(p);
}

std::unique_ptr<Kernel> make_bitcrush_kernel(std::span<const double> p) {
  return std::make_unique<BitcrushKernel>(p);
}

std::unique_ptr<Kernel> make_pitchshift_kernel(std::span<const double> p) {
  return std::make_unique<PitchshiftKernel>(p);
}

}  // namespace graphfx::dsp
