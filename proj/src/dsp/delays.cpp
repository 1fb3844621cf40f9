#include <array>
#include <cmath>

#include "graphfx/dsp/biquad.hpp"
#include "kernels.hpp"

namespace graphfx::dsp {

namespace {

double ms_to_samples(double ms) { return ms * kSampleRate / 1000.0; }

// Chorus, flanger and vibrato: a modulated fractional delay with feedback.
// The types differ only in their delay range. Params: delay, feedback, mix.
class ModDelayKernel final : public Kernel {
 public:
  ModDelayKernel(TypeId type, std::span<const double> p)
      : type_(type),
        v_(p[0]),
        feedback_(physical(type, 1, p)),
        mix_(physical(type, 2, p)),
        lines_{DelayLine(max_delay(type)), DelayLine(max_delay(type))} {}

  void reset() override {
    for (auto& l : lines_) l.reset();
  }

  void process(const BlockIo& io) override {
    for (std::size_t c = 0; c < kChannels; ++c) {
      auto& line = lines_[c];
      for (std::size_t i = 0; i < io.frames; ++i) {
        const double d = ms_to_samples(modulated(type_, 0, v_, io.input(1, c, i)));
        const double wet = line.read(d);
        const double x = io.input(0, c, i);
        line.push(x + feedback_ * wet);
        io.output(0, c, i) = (1.0 - mix_) * x + mix_ * wet;
      }
    }
  }

 private:
  static std::size_t max_delay(TypeId type) {
    return static_cast<std::size_t>(ms_to_samples(spec_of(type).params[0].phys_max)) + 2;
  }

  TypeId type_;
  double v_;
  double feedback_;
  double mix_;
  std::array<DelayLine, kChannels> lines_;
};

// Mono and ping-pong echo. A bandpass on the feedback path colours repeats;
// `stereo_offset` lengthens the right tap by that fraction of the delay.
// Params: delay, feedback, mix, frequency, q, stereo_offset.
class EchoKernel final : public Kernel {
 public:
  EchoKernel(TypeId type, std::span<const double> p)
      : pingpong_(type == id_of(Proc::pingpong_delay)),
        delay_(ms_to_samples(physical(type, 0, p))),
        feedback_(physical(type, 1, p)),
        mix_(physical(type, 2, p)),
        coeffs_(design_biquad(BiquadShape::bandpass, physical(type, 3, p), physical(type, 4, p),
                              0.0, kSampleRate)),
        right_delay_(delay_ * (1.0 + physical(type, 5, p))),
        lines_{DelayLine(capacity()), DelayLine(capacity())} {}

  void reset() override {
    for (auto& l : lines_) l.reset();
    for (auto& f : filters_) f.reset();
  }

  void process(const BlockIo& io) override {
    for (std::size_t i = 0; i < io.frames; ++i) {
      const double xl = io.input(0, 0, i);
      const double xr = io.input(0, 1, i);
      const double mid = 0.5 * (xl + xr);
      double wl = 0.0;
      double wr = 0.0;
      if (pingpong_) {
        wl = lines_[0].read(delay_);
        wr = lines_[1].read(right_delay_);
        lines_[0].push(mid + feedback_ * filters_[1].process(wr, coeffs_));
        lines_[1].push(filters_[0].process(wl, coeffs_));
      } else {
        wl = lines_[0].read(delay_);
        wr = lines_[0].read(right_delay_);
        lines_[0].push(mid + feedback_ * filters_[0].process(wl, coeffs_));
      }
      io.output(0, 0, i) = (1.0 - mix_) * xl + mix_ * wl;
      io.output(0, 1, i) = (1.0 - mix_) * xr + mix_ * wr;
    }
  }

 private:
  std::size_t capacity() const { return static_cast<std::size_t>(right_delay_) + 2; }

  bool pingpong_;
  double delay_;
  double feedback_;
  double mix_;
  BiquadCoeffs coeffs_;
  double right_delay_;
  std::array<DelayLine, kChannels> lines_;
  std::array<Biquad, kChannels> filters_{};
};

}  // namespace

std::unique_ptr<Kernel> make_mod_delay_kernel(TypeId type, std::span<const double> p) {
  return std::make_unique<ModDelayKernel>(type, p);
}

std::unique_ptr<Kernel> make_echo_kernel(TypeId type, std::span<const double> p) {
  return std::make_unique<EchoKernel>(type, p);
}

}  // namespace graphfx::dsp
