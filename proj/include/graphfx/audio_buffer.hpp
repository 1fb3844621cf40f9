#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace graphfx {

inline constexpr int kSampleRate = 44100;
inline constexpr std::size_t kChannels = 2;
// 417 hops of 384 samples, ~3.63 s.
inline constexpr std::size_t kDefaultSegmentLength = 160128;
inline constexpr std::size_t kBlockLength = 512;

// Fixed-rate stereo sample block. Audio and control signals share this type.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  explicit AudioBuffer(std::size_t length);

  std::size_t length() const noexcept { return data_[0].size(); }

  std::span<double> channel(std::size_t c) { return data_[c]; }
  std::span<const double> channel(std::size_t c) const { return data_[c]; }

  double& at(std::size_t c, std::size_t n) { return data_[c][n]; }
  double at(std::size_t c, std::size_t n) const { return data_[c][n]; }

  // Sum of squared samples over all channels.
  double energy() const noexcept;
  bool is_finite() const noexcept;
  bool is_silent(double eps = 1e-12) const noexcept { return energy() <= eps; }

  void fill(double v);
  void scale(double g);
  // this += g * other
  void add_scaled(const AudioBuffer& other, double g);

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  std::array<std::vector<double>, kChannels> data_;
};

}  // namespace graphfx
