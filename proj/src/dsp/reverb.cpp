#include <array>
#include <vector>

#include "kernels.hpp"

namespace graphfx::dsp {

namespace {

constexpr std::array<int, 8> kCombTuning = {1116, 1188, 1277, 1356, 1422, 1491, 1557, 1617};
constexpr std::array<int, 4> kAllpassTuning = {556, 441, 341, 225};
constexpr int kStereoSpread = 23;
constexpr double kCombFeedback = 0.84;
constexpr double kAllpassFeedback = 0.5;
constexpr double kInputGain = 0.015;
constexpr double kWetScale = 3.0;

class Comb {
 public:
  explicit Comb(std::size_t length) : buf_(length, 0.0) {}
  double process(double x, double damp) {
    const double out = buf_[i_];
    store_ = out * (1.0 - damp) + store_ * damp;
    buf_[i_] = x + store_ * kCombFeedback;
    if (++i_ == buf_.size()) i_ = 0;
    return out;
  }
  void reset() {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    store_ = 0.0;
    i_ = 0;
  }

 private:
  std::vector<double> buf_;
  double store_ = 0.0;
  std::size_t i_ = 0;
};

class Allpass {
 public:
  explicit Allpass(std::size_t length) : buf_(length, 0.0) {}
  double process(double x) {
    const double held = buf_[i_];
    buf_[i_] = x + held * kAllpassFeedback;
    if (++i_ == buf_.size()) i_ = 0;
    return held - x;
  }
  void reset() {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    i_ = 0;
  }

 private:
  std::vector<double> buf_;
  std::size_t i_ = 0;
};

// Schroeder/Freeverb network, 8 combs + 4 allpasses per channel. `size`
// scales the comb and allpass lengths by (0.5 + size); `damping` is the comb
// lowpass coefficient; `width` blends the wet channels. The mono variant
// feeds the mid signal to both banks. Params: size, damping, width, mix.
class ReverbKernel final : public Kernel {
 public:
  ReverbKernel(TypeId type, std::span<const double> p)
      : mono_(type == id_of(Proc::mono_reverb)),
        damp_(0.4 * physical(type, 1, p)),
        mix_(physical(type, 3, p)) {
    const double scale = 0.5 + physical(type, 0, p);
    const double width = physical(type, 2, p);
    wet1_ = width / 2.0 + 0.5;
    wet2_ = (1.0 - width) / 2.0;
    for (std::size_t c = 0; c < kChannels; ++c) {
      const int spread = c == 0 ? 0 : kStereoSpread;
      for (int t : kCombTuning)
        combs_[c].emplace_back(static_cast<std::size_t>((t + spread) * scale));
      for (int t : kAllpassTuning)
        allpasses_[c].emplace_back(static_cast<std::size_t>((t + spread) * scale));
    }
  }

  void reset() override {
    for (auto& bank : combs_)
      for (auto& c : bank) c.reset();
    for (auto& bank : allpasses_)
      for (auto& a : bank) a.reset();
  }

  void process(const BlockIo& io) override {
    for (std::size_t i = 0; i < io.frames; ++i) {
      const double xl = io.input(0, 0, i);
      const double xr = io.input(0, 1, i);
      const double mid = 0.5 * (xl + xr);
      std::array<double, kChannels> feed = {mono_ ? mid : xl, mono_ ? mid : xr};
      std::array<double, kChannels> wet{};
      for (std::size_t c = 0; c < kChannels; ++c) {
        const double in = feed[c] * kInputGain;
        double acc = 0.0;
        for (auto& comb : combs_[c]) acc += comb.process(in, damp_);
        for (auto& ap : allpasses_[c]) acc = ap.process(acc);
        wet[c] = acc * kWetScale;
      }
      const double wl = wet[0] * wet1_ + wet[1] * wet2_;
      const double wr = wet[1] * wet1_ + wet[0] * wet2_;
      io.output(0, 0, i) = (1.0 - mix_) * xl + mix_ * wl;
      io.output(0, 1, i) = (1.0 - mix_) * xr + mix_ * wr;
    }
  }

 private:
  bool mono_;
  double damp_;
  double mix_;
  double wet1_ = 1.0;
  double wet2_ = 0.0;
  std::array<std::vector<Comb>, kChannels> combs_;
  std::array<std::vector<Allpass>, kChannels> allpasses_;
};

}  // namespace

std::unique_ptr<Kernel> make_reverb_kernel(TypeId type, std::span<const double> p) {
  return std::make_unique<ReverbKernel>(type, p);
}

}  // namespace graphfx::dsp
