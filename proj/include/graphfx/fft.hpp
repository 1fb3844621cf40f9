#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace graphfx {

// Real-input forward DFT of a fixed size (FFTW-backed). Thread-safe: plans
// are created once per size under a lock and executed with new-array calls.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  std::size_t bins() const noexcept { return size_ / 2 + 1; }

  // Writes bins() complex values; input.size() must equal size().
  void forward(std::span<const double> input, std::span<std::complex<double>> output) const;
  std::vector<std::complex<double>> forward(std::span<const double> input) const;

 private:
  std::size_t size_;
  void* plan_;  // fftw_plan, owned by the process-wide cache
};

// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

}  // namespace graphfx
