#pragma once

// Kernel factories and shared helpers, internal to the dsp sources.

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "graphfx/dsp/kernel.hpp"

namespace graphfx::dsp {

std::unique_ptr<Kernel> make_filter_kernel(TypeId type, std::span<const double> p);
std::unique_ptr<Kernel> make_crossover_kernel(std::span<const double> p);
std::unique_ptr<Kernel> make_phaser_kernel(std::span<const double> p);
std::unique_ptr<Kernel> make_mod_delay_kernel(TypeId type, std::span<const double> p);
std::unique_ptr<Kernel> make_echo_kernel(TypeId type, std::span<const double> p);
std::unique_ptr<Kernel> make_reverb_kernel(TypeId type, std::span<const double> p);
std::unique_ptr<Kernel> make_distortion_kernel(std::span<const double> p);
std::unique_ptr<Kernel> make_bitcrush_kernel(std::span<const double> p);
std::unique_ptr<Kernel> make_dynamics_kernel(TypeId type, std::span<const double> p);
std::unique_ptr<Kernel> make_pitchshift_kernel(std::span<const double> p);
std::unique_ptr<Kernel> make_utility_kernel(TypeId type, std::span<const double> p);
std::unique_ptr<Kernel> make_control_kernel(TypeId type, std::span<const double> p);

double physical(TypeId type, std::size_t index, std::span<const double> p);

// One-pole smoothing coefficient for a time constant in milliseconds.
inline double one_pole_coeff(double time_ms) {
  return std::exp(-1000.0 / (time_ms * kSampleRate));
}

inline double db_to_amp(double db) { return std::pow(10.0, db / 20.0); }

// Circular delay line with linear-interpolated reads.
class DelayLine {
 public:
  explicit DelayLine(std::size_t max_delay) {
    std::size_t size = 1;
    while (size < max_delay + 4) size <<= 1;
    buf_.assign(size, 0.0);
    mask_ = size - 1;
  }
  void push(double x) {
    buf_[write_] = x;
    write_ = (write_ + 1) & mask_;
  }
  // Sample `delay` steps behind the most recent push; fractional delays
  // interpolate linearly.
  double read(double delay) const {
    const double pos = static_cast<double>(write_ + buf_.size() - 1) - delay;
    const double base = std::floor(pos);
    const double frac = pos - base;
    const auto i0 = static_cast<std::size_t>(base) & mask_;
    const auto i1 = (i0 + 1) & mask_;
    return buf_[i0] + frac * (buf_[i1] - buf_[i0]);
  }
  void reset() {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    write_ = 0;
  }

 private:
  std::vector<double> buf_;
  std::size_t mask_ = 0;
  std::size_t write_ = 0;
};

}  // namespace graphfx::dsp
