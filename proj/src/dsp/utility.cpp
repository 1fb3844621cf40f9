#include <cmath>
#include <numbers>

#include "kernels.hpp"

namespace graphfx::dsp {

namespace {

class MixKernel final : public Kernel {
 public:
  void reset() override {}
  void process(const BlockIo& io) override {
    for (std::size_t c = 0; c < kChannels; ++c)
      for (std::size_t i = 0; i < io.frames; ++i) io.output(0, c, i) = io.input(0, c, i);
  }
};

// Equal-power pan; each channel reads its own control sample.
class PanningKernel final : public Kernel {
 public:
  explicit PanningKernel(std::span<const double> p) : v_(p[0]) {}
  void reset() override {}
  void process(const BlockIo& io) override {
    const TypeId type = id_of(Proc::panning);
    for (std::size_t i = 0; i < io.frames; ++i) {
      const double tl = (modulated(type, 0, v_, io.input(1, 0, i)) + 1.0) * std::numbers::pi / 4;
      const double tr = (modulated(type, 0, v_, io.input(1, 1, i)) + 1.0) * std::numbers::pi / 4;
      io.output(0, 0, i) = std::cos(tl) * io.input(0, 0, i);
      io.output(0, 1, i) = std::sin(tr) * io.input(0, 1, i);
    }
  }

 private:
  double v_;
};

class ImagerKernel final : public Kernel {
 public:
  explicit ImagerKernel(std::span<const double> p)
      : side_gain_(2.0 * physical(id_of(Proc::imager), 0, p)) {}
  void reset() override {}
  void process(const BlockIo& io) override {
    for (std::size_t i = 0; i < io.frames; ++i) {
      const double l = io.input(0, 0, i);
      const double r = io.input(0, 1, i);
      const double m = 0.5 * (l + r);
      const double s = 0.5 * (l - r) * side_gain_;
      io.output(0, 0, i) = m + s;
      io.output(0, 1, i) = m - s;
    }
  }

 private:
  double side_gain_;
};

class MsSplitKernel final : public Kernel {
 public:
  void reset() override {}
  void process(const BlockIo& io) override {
    for (std::size_t i = 0; i < io.frames; ++i) {
      const double l = io.input(0, 0, i);
      const double r = io.input(0, 1, i);
      const double m = 0.5 * (l + r);
      const double s = 0.5 * (l - r);
      io.output(0, 0, i) = m;
      io.output(0, 1, i) = m;
      io.output(1, 0, i) = s;
      io.output(1, 1, i) = s;
    }
  }
};

class MsMergeKernel final : public Kernel {
 public:
  void reset() override {}
  void process(const BlockIo& io) override {
    for (std::size_t i = 0; i < io.frames; ++i) {
      io.output(0, 0, i) = io.input(0, 0, i) + io.input(1, 0, i);
      io.output(0, 1, i) = io.input(0, 1, i) - io.input(1, 1, i);
    }
  }
};

}  // namespace

std::unique_ptr<Kernel> make_utility_kernel(TypeId type, std::span<const double> p) {
  switch (static_cast<Proc>(type)) {
    case Proc::mix:
      return std::make_unique<MixKernel>();
    case Proc::panning:
      return std::make_unique<PanningKernel>(p);
    case Proc::imager:
      return std::make_unique<ImagerKernel>(p);
    case Proc::ms_split:
      return std::make_unique<MsSplitKernel>();
    default:
      return std::make_unique<MsMergeKernel>();
  }
}

}  // namespace graphfx::dsp
