#include "graphfx/dsp/biquad.hpp"

#include <cmath>
#include <numbers>

namespace graphfx::dsp {

std::complex<double> BiquadCoeffs::response(double freq_hz, double sample_rate) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  return (b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2);
}

BiquadCoeffs design_biquad(BiquadShape shape, double freq_hz, double q, double gain_db,
                           double sample_rate) {
  const double w0 = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  const double alpha = sw / (2.0 * q);
  const double a = std::pow(10.0, gain_db / 40.0);
  const double sqrt_a2 = 2.0 * std::sqrt(a) * alpha;

  double b0 = 1, b1 = 0, b2 = 0, a0 = 1, a1 = 0, a2 = 0;
  switch (shape) {
    case BiquadShape::lowpass:
      b0 = (1.0 - cw) / 2.0;
      b1 = 1.0 - cw;
      b2 = b0;
      a0 = 1.0 + alpha;
      a1 = -2.0 * cw;
      a2 = 1.0 - alpha;
      break;
    case BiquadShape::highpass:
      b0 = (1.0 + cw) / 2.0;
      b1 = -(1.0 + cw);
      b2 = b0;
      a0 = 1.0 + alpha;
      a1 = -2.0 * cw;
      a2 = 1.0 - alpha;
      break;
    case BiquadShape::bandpass:
      b0 = alpha;
      b1 = 0.0;
      b2 = -alpha;
      a0 = 1.0 + alpha;
      a1 = -2.0 * cw;
      a2 = 1.0 - alpha;
      break;
    case BiquadShape::bandreject:
      b0 = 1.0;
      b1 = -2.0 * cw;
      b2 = 1.0;
      a0 = 1.0 + alpha;
      a1 = -2.0 * cw;
      a2 = 1.0 - alpha;
      break;
    case BiquadShape::bell:
      b0 = 1.0 + alpha * a;
      b1 = -2.0 * cw;
      b2 = 1.0 - alpha * a;
      a0 = 1.0 + alpha / a;
      a1 = -2.0 * cw;
      a2 = 1.0 - alpha / a;
      break;
    case BiquadShape::lowshelf:
      b0 = a * ((a + 1.0) - (a - 1.0) * cw + sqrt_a2);
      b1 = 2.0 * a * ((a - 1.0) - (a + 1.0) * cw);
      b2 = a * ((a + 1.0) - (a - 1.0) * cw - sqrt_a2);
      a0 = (a + 1.0) + (a - 1.0) * cw + sqrt_a2;
      a1 = -2.0 * ((a - 1.0) + (a + 1.0) * cw);
      a2 = (a + 1.0) + (a - 1.0) * cw - sqrt_a2;
      break;
    case BiquadShape::highshelf:
      b0 = a * ((a + 1.0) + (a - 1.0) * cw + sqrt_a2);
      b1 = -2.0 * a * ((a - 1.0) + (a + 1.0) * cw);
      b2 = a * ((a + 1.0) + (a - 1.0) * cw - sqrt_a2);
      a0 = (a + 1.0) - (a - 1.0) * cw + sqrt_a2;
      a1 = 2.0 * ((a - 1.0) - (a + 1.0) * cw);
      a2 = (a + 1.0) - (a - 1.0) * cw - sqrt_a2;
      break;
  }
  return {b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0};
}

}  // namespace graphfx::dsp
