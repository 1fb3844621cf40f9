#include <algorithm>
#include <cmath>

#include "graphfx/dsp/dynamics.hpp"
#include "kernels.hpp"

namespace graphfx::dsp {

double static_gain_db(DynamicsMode mode, double level_db, double threshold_db, double ratio,
                      double knee_db) {
  const double x = level_db;
  const double t = threshold_db;
  const double w = knee_db;
  const double over = 2.0 * (x - t);
  if (mode == DynamicsMode::compress) {
    if (over < -w) return 0.0;
    if (over > w || w <= 0.0) return (t + (x - t) / ratio) - x;
    const double d = x - t + w / 2.0;
    return (1.0 / ratio - 1.0) * d * d / (2.0 * w);
  }
  const double r = mode == DynamicsMode::gate ? ratio * ratio : ratio;
  if (over > w) return 0.0;
  if (over < -w || w <= 0.0) return (t + (x - t) * r) - x;
  const double d = x - t - w / 2.0;
  return -(r - 1.0) * d * d / (2.0 * w);
}

namespace {

constexpr double kLevelFloorDb = -120.0;
// Deepest attenuation, as on a gate's range control.
constexpr double kRangeDb = 80.0;
const double kDetector = one_pole_coeff(10.0);

DynamicsMode mode_of(TypeId type) {
  switch (static_cast<Proc>(type)) {
    case Proc::noisegate:
      return DynamicsMode::gate;
    case Proc::expander:
      return DynamicsMode::expand;
    default:
      return DynamicsMode::compress;
  }
}

// Feed-forward gain computer on a stereo RMS level (10 ms mean square, the
// same measure the randomizer draws thresholds from), with attack/release
// smoothing of the gain reduction. The detector reads the sidechain when it
// is connected.
class DynamicsKernel final : public Kernel {
 public:
  DynamicsKernel(TypeId type, std::span<const double> p)
      : mode_(mode_of(type)),
        threshold_(physical(type, 0, p)),
        ratio_(physical(type, 1, p)),
        attack_(one_pole_coeff(physical(type, 2, p))),
        release_(one_pole_coeff(physical(type, 3, p))),
        knee_(physical(type, 4, p)) {}

  void reset() override {
    reduction_ = 0.0;
    mean_square_ = 0.0;
  }

  void process(const BlockIo& io) override {
    const std::size_t det = io.connected(1) ? 1 : 0;
    for (std::size_t i = 0; i < io.frames; ++i) {
      const double l = io.input(det, 0, i);
      const double r = io.input(det, 1, i);
      mean_square_ = kDetector * mean_square_ + (1.0 - kDetector) * 0.5 * (l * l + r * r);
      const double level = mean_square_ > 0.0
                               ? std::max(10.0 * std::log10(mean_square_), kLevelFloorDb)
                               : kLevelFloorDb;
      const double target =
          std::min(-static_gain_db(mode_, level, threshold_, ratio_, knee_), kRangeDb);
      // Compressors attack as the reduction grows; expanders and gates
      // attack as they open, i.e. as it shrinks.
      const bool growing = target > reduction_;
      const double a = growing == (mode_ == DynamicsMode::compress) ? attack_ : release_;
      reduction_ = a * reduction_ + (1.0 - a) * target;
      const double g = db_to_amp(-reduction_);
      for (std::size_t c = 0; c < kChannels; ++c) io.output(0, c, i) = g * io.input(0, c, i);
    }
  }

 private:
  DynamicsMode mode_;
  double threshold_;
  double ratio_;
  double attack_;
  double release_;
  double knee_;
  double reduction_ = 0.0;
  double mean_square_ = 0.0;
};

}  // namespace

std::unique_ptr<Kernel> make_dynamics_kernel(TypeId type, std::span<const double> p) {
  return std::make_unique<DynamicsKernel>(type, p);
}

}  // namespace graphfx::dsp
