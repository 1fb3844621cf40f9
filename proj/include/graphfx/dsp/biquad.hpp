#pragma once

#include <array>
#include <complex>

namespace graphfx::dsp {

enum class BiquadShape { lowpass, highpass, bandpass, bandreject, lowshelf, highshelf, bell };

// Normalized coefficients (a0 == 1).
struct BiquadCoeffs {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;

  std::complex<double> response(double freq_hz, double sample_rate) const;
};

// Audio-EQ-cookbook designs. gain_db only affects shelves and bell.
BiquadCoeffs design_biquad(BiquadShape shape, double freq_hz, double q, double gain_db,
                           double sample_rate);

// Transposed direct form II section. The state is kept in extended precision:
// low, sharp sections amplify state rounding, and reordered LTI chains must
// render the same down to quiet stopband bins.
class Biquad {
 public:
  double process(double x, const BiquadCoeffs& c) {
    return static_cast<double>(process_ext(x, c));
  }
  // Cascades pass the extended value straight to the next section.
  long double process_ext(long double x, const BiquadCoeffs& c) {
    const long double y = c.b0 * x + s1_;
    s1_ = c.b1 * x - c.a1 * y + s2_;
    s2_ = c.b2 * x - c.a2 * y;
    return y;
  }
  void reset() { s1_ = s2_ = 0.0L; }

 private:
  long double s1_ = 0.0L;
  long double s2_ = 0.0L;
};

}  // namespace graphfx::dsp
