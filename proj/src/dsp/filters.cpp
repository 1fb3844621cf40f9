#include <array>
#include <cmath>
#include <numbers>

#include "graphfx/dsp/biquad.hpp"
#include "kernels.hpp"

namespace graphfx::dsp {

namespace {

struct FilterShape {
  BiquadShape shape;
  int stages;
};

FilterShape shape_of(TypeId type) {
  switch (static_cast<Proc>(type)) {
    case Proc::lowpass: return {BiquadShape::lowpass, 1};
    case Proc::bandpass: return {BiquadShape::bandpass, 1};
    case Proc::highpass: return {BiquadShape::highpass, 1};
    case Proc::bandreject: return {BiquadShape::bandreject, 1};
    case Proc::lowpass4: return {BiquadShape::lowpass, 2};
    case Proc::bandpass4: return {BiquadShape::bandpass, 2};
    case Proc::highpass4: return {BiquadShape::highpass, 2};
    case Proc::lowshelf: return {BiquadShape::lowshelf, 1};
    case Proc::highshelf: return {BiquadShape::highshelf, 1};
    default: return {BiquadShape::bell, 1};
  }
}

// Low/band/highpass, bandreject, fourth-order variants, shelves and bell.
// Inlets: in, frequency*, [gain*]. Params: frequency, q, [gain].
class FilterKernel final : public Kernel {
 public:
  FilterKernel(TypeId type, std::span<const double> p)
      : type_(type), shape_(shape_of(type)), params_(p.begin(), p.end()) {
    has_gain_ = params_.size() > 2;
    q_ = physical(type_, 1, params_);
    fixed_ = design(0.0, 0.0);
  }

  void reset() override {
    for (auto& ch : sections_)
      for (auto& s : ch) s.reset();
  }

  void process(const BlockIo& io) override {
    const bool mod_freq = io.connected(1);
    const bool mod_gain = has_gain_ && io.connected(2);
    for (std::size_t c = 0; c < kChannels; ++c) {
      auto& sec = sections_[c];
      for (std::size_t i = 0; i < io.frames; ++i) {
        BiquadCoeffs k = fixed_;
        if (mod_freq || mod_gain) {
          k = design(io.input(1, c, i), mod_gain ? io.input(2, c, i) : 0.0);
        }
        long double y = io.input(0, c, i);
        for (int s = 0; s < shape_.stages; ++s) y = sec[static_cast<std::size_t>(s)].process_ext(y, k);
        io.output(0, c, i) = static_cast<double>(y);
      }
    }
  }

 private:
  BiquadCoeffs design(double freq_control, double gain_control) const {
    const double f = modulated(type_, 0, params_[0], freq_control);
    const double g = has_gain_ ? modulated(type_, 2, params_[2], gain_control) : 0.0;
    return design_biquad(shape_.shape, f, q_, g, kSampleRate);
  }

  TypeId type_;
  FilterShape shape_;
  std::vector<double> params_;
  bool has_gain_ = false;
  double q_ = 0.7071;
  BiquadCoeffs fixed_;
  std::array<std::array<Biquad, 2>, kChannels> sections_{};
};

// Fourth-order Linkwitz-Riley split: two cascaded Butterworth sections per
// band. Outlets: low, high.
class CrossoverKernel final : public Kernel {
 public:
  explicit CrossoverKernel(std::span<const double> p) : v_(p[0]) { design(0.0); }

  void reset() override {
    for (auto& ch : sections_)
      for (auto& s : ch) s.reset();
  }

  void process(const BlockIo& io) override {
    const bool mod = io.connected(1);
    const BiquadCoeffs lp0 = lp_;
    const BiquadCoeffs hp0 = hp_;
    for (std::size_t c = 0; c < kChannels; ++c) {
      auto& s = sections_[c];
      for (std::size_t i = 0; i < io.frames; ++i) {
        if (mod) design(io.input(1, c, i));
        const double x = io.input(0, c, i);
        io.output(0, c, i) = s[1].process(s[0].process(x, lp_), lp_);
        io.output(1, c, i) = s[3].process(s[2].process(x, hp_), hp_);
      }
    }
    lp_ = lp0;
    hp_ = hp0;
  }

 private:
  void design(double control) {
    const double f = modulated(id_of(Proc::crossover), 0, v_, control);
    lp_ = design_biquad(BiquadShape::lowpass, f, std::numbers::sqrt2 / 2.0, 0.0, kSampleRate);
    hp_ = design_biquad(BiquadShape::highpass, f, std::numbers::sqrt2 / 2.0, 0.0, kSampleRate);
  }

  double v_;
  BiquadCoeffs lp_, hp_;
  std::array<std::array<Biquad, 4>, kChannels> sections_{};
};

// Four first-order allpasses whose break frequency follows `mod`, with
// feedback around the cascade. Params: frequency, feedback, mix.
class PhaserKernel final : public Kernel {
 public:
  explicit PhaserKernel(std::span<const double> p)
      : v_(p[0]),
        feedback_(physical(id_of(Proc::phaser), 1, p)),
        mix_(physical(id_of(Proc::phaser), 2, p)) {}

  void reset() override {
    for (auto& ch : state_) ch = {};
    last_ = {};
  }

  void process(const BlockIo& io) override {
    for (std::size_t c = 0; c < kChannels; ++c) {
      auto& st = state_[c];
      for (std::size_t i = 0; i < io.frames; ++i) {
        const double f = modulated(id_of(Proc::phaser), 0, v_, io.input(1, c, i));
        const double t = std::tan(std::numbers::pi * f / kSampleRate);
        const double a = (t - 1.0) / (t + 1.0);
        const double x = io.input(0, c, i);
        double y = x + feedback_ * last_[c];
        for (auto& s : st) {
          const double out = a * y + s;
          s = y - a * out;
          y = out;
        }
        last_[c] = y;
        io.output(0, c, i) = (1.0 - mix_) * x + mix_ * y;
      }
    }
  }

 private:
  double v_;
  double feedback_;
  double mix_;
  std::array<std::array<double, 4>, kChannels> state_{};
  std::array<double, kChannels> last_{};
};

}  // namespace

std::unique_ptr<Kernel> make_filter_kernel(TypeId type, std::span<const double> p) {
  return std::make_unique<FilterKernel>(type, p);
}

std::unique_ptr<Kernel> make_crossover_kernel(std::span<const double> p) {
  return std::make_unique<CrossoverKernel>(p);
}

std::unique_ptr<Kernel> make_phaser_kernel(std::span<const double> p) {
  return std::make_unique<PhaserKernel>(p);
}

}  // namespace graphfx::dsp
