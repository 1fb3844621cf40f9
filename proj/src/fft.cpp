#include "graphfx/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include <fftw3.h>

namespace graphfx {

namespace {

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(std::size_t n) {
  std::lock_guard lock(plan_mutex());
  static std::map<std::size_t, fftw_plan> cache;
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  double* in = fftw_alloc_real(n);
  fftw_complex* out = fftw_alloc_complex(n / 2 + 1);
  fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  if (!p) throw std::runtime_error("fftw planning failed");
  cache.emplace(n, p);
  return p;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size), plan_(nullptr) {
  if (size == 0) throw std::invalid_argument("fft size must be positive");
  plan_ = plan_for(size);
}

void RealFft::forward(std::span<const double> input,
                      std::span<std::complex<double>> output) const {
  if (input.size() != size_ || output.size() < bins()) {
    throw std::invalid_argument("fft buffer size mismatch");
  }
  // FFTW may use the input as scratch for r2c; plans here preserve input.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_), const_cast<double*>(input.data()),
                       reinterpret_cast<fftw_complex*>(output.data()));
}

std::vector<std::complex<double>> RealFft::forward(std::span<const double> input) const {
  std::vector<std::complex<double>> out(bins());
  forward(input, out);
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

}  // namespace graphfx
