#include "graphfx/audio_buffer.hpp"

#include <cmath>

namespace graphfx {

AudioBuffer::AudioBuffer(std::size_t length) {
  for (auto& ch : data_) ch.assign(length, 0.0);
}

double AudioBuffer::energy() const noexcept {
  double e = 0.0;
  for (const auto& ch : data_)
    for (double s : ch) e += s * s;
  return e;
}

bool AudioBuffer::is_finite() const noexcept {
  for (const auto& ch : data_)
    for (double s : ch)
      if (!std::isfinite(s)) return false;
  return true;
}

void AudioBuffer::fill(double v) {
  for (auto& ch : data_) std::fill(ch.begin(), ch.end(), v);
}

void AudioBuffer::scale(double g) {
  for (auto& ch : data_)
    for (double& s : ch) s *= g;
}

void AudioBuffer::add_scaled(const AudioBuffer& other, double g) {
  for (std::size_t c = 0; c < kChannels; ++c) {
    auto& dst = data_[c];
    const auto& src = other.data_[c];
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += g * src[n];
  }
}

}  // namespace graphfx
